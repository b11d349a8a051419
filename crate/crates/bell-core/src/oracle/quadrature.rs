//! Adaptive multidimensional quadrature over Gaussian-sum Wigner functions.
//!
//! A degree-7 Genz-Malik cubature rule with an embedded degree-5 error
//! estimate, driven by worst-first region subdivision. Sign weights are
//! handled by integrating in rotated quadrature coordinates and pre-splitting
//! the box along the discontinuity planes, so every region sees a smooth
//! integrand.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::gaussian::{GaussianSumWigner, GaussianTerm};

/// Controls for the adaptive cubature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Integration box half-width in units of the widest term's standard
    /// deviation (per axis).
    pub half_width_sigmas: f64,
    /// Relative tolerance; the absolute floor is this tolerance times the
    /// running estimate of `integral |f|`, so near-zero results converge too.
    pub rel_tol: f64,
    /// Maximum number of regions before giving up.
    pub max_regions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            half_width_sigmas: 8.0,
            rel_tol: 1e-7,
            max_regions: 600_000,
        }
    }
}

impl QuadratureSpec {
    fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) {
            return Err(Error::InvalidConfig {
                field: "rel_tol",
                reason: format!("must be positive, got {}", self.rel_tol),
            });
        }
        if !(self.half_width_sigmas >= 5.0) {
            return Err(Error::InvalidConfig {
                field: "half_width_sigmas",
                reason: format!("must be at least 5, got {}", self.half_width_sigmas),
            });
        }
        Ok(())
    }
}

/// Weight multiplying the Wigner function under the integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IntegrandWeight {
    /// Plain normalization integral.
    Unit,
    /// `sign(x_theta) * sign(x_phi)` with `x_theta` the rotated quadrature of
    /// mode a and `x_phi` of mode b.
    QuadrantSign { theta: f64, phi: f64 },
}

/// Converged estimate with its reported error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error_bound: f64,
    pub regions: usize,
}

/// Integrate `weight * W` over the full phase space.
pub fn integrate(
    state: &GaussianSumWigner,
    weight: IntegrandWeight,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    spec.validate()?;
    let hw = spec.half_width_sigmas;

    match weight {
        IntegrandWeight::Unit => {
            // Integrate in the decorrelated frame x+- = (x1 +- x2)/sqrt(2),
            // y+- likewise, scaled to unit standard deviation per axis: the
            // kernels' only cross-mode correlation lives in those pairs, so
            // every term becomes axis-aligned and the mesh matches its scale.
            let s = pm_frame_sigmas(state.terms());
            let jacobian: f64 = s.iter().product();
            let inv = std::f64::consts::FRAC_1_SQRT_2;
            let f = move |w: &[f64; 4]| {
                let (xp, xm, yp, ym) = (s[0] * w[0], s[1] * w[1], s[2] * w[2], s[3] * w[3]);
                jacobian
                    * state.value_xy(
                        (xp + xm) * inv,
                        (yp + ym) * inv,
                        (xp - xm) * inv,
                        (yp - ym) * inv,
                    )
            };
            adaptive(&f, 4, &[hw, hw, hw, hw], spec)
        }
        IntegrandWeight::QuadrantSign { theta, phi } => {
            // Rotated frame: z = (u1, v1, u2, v2); the sign planes u1 = 0 and
            // u2 = 0 are axis-aligned and coincide with mesh boundaries.
            let (sigma_a, sigma_b) = mode_sigmas(state.terms());
            let half = [hw * sigma_a, hw * sigma_a, hw * sigma_b, hw * sigma_b];
            let (ct, st) = (theta.cos(), theta.sin());
            let (cp, sp) = (phi.cos(), phi.sin());
            let f = move |z: &[f64; 4]| {
                let x1 = z[0] * ct - z[1] * st;
                let y1 = z[0] * st + z[1] * ct;
                let x2 = z[2] * cp - z[3] * sp;
                let y2 = z[2] * sp + z[3] * cp;
                let sgn = z[0].signum() * z[2].signum();
                sgn * state.value_xy(x1, y1, x2, y2)
            };
            adaptive(&f, 4, &half, spec)
        }
    }
}

/// Largest standard deviation over the terms along each of the decorrelated
/// axes `(x+, x-, y+, y-)`: the pair variances are `(p + q +- 2s)/(4(pq - s^2))`.
fn pm_frame_sigmas(terms: &[GaussianTerm]) -> [f64; 4] {
    let mut v = [0.0f64; 4];
    for t in terms {
        let d = 4.0 * (t.p * t.q - t.s * t.s);
        let plus = (t.p + t.q + 2.0 * t.s) / d;
        let minus = (t.p + t.q - 2.0 * t.s) / d;
        v[0] = v[0].max(plus);
        v[1] = v[1].max(minus);
        v[2] = v[2].max(minus);
        v[3] = v[3].max(plus);
    }
    v.map(f64::sqrt)
}

/// Joint quadrature density `P(u1, u2)` at one point, obtained by 2D
/// cubature of the Wigner function over the two conjugate quadratures.
pub fn marginal_density(
    state: &GaussianSumWigner,
    theta: f64,
    phi: f64,
    u1: f64,
    u2: f64,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    spec.validate()?;
    let (sigma_a, sigma_b) = mode_sigmas(state.terms());
    let w = spec.half_width_sigmas;
    let half = [w * sigma_a, w * sigma_b, 0.0, 0.0];
    let (ct, st) = (theta.cos(), theta.sin());
    let (cp, sp) = (phi.cos(), phi.sin());
    let f = move |z: &[f64; 4]| {
        let (v1, v2) = (z[0], z[1]);
        let x1 = u1 * ct - v1 * st;
        let y1 = u1 * st + v1 * ct;
        let x2 = u2 * cp - v2 * sp;
        let y2 = u2 * sp + v2 * cp;
        state.value_xy(x1, y1, x2, y2)
    };
    adaptive(&f, 2, &half, spec)
}

/// Largest per-axis standard deviation over the terms, for modes a and b.
fn mode_sigmas(terms: &[GaussianTerm]) -> (f64, f64) {
    let mut va: f64 = 0.0;
    let mut vb: f64 = 0.0;
    for t in terms {
        let d = t.p * t.q - t.s * t.s;
        va = va.max(t.q / (2.0 * d));
        vb = vb.max(t.p / (2.0 * d));
    }
    (va.sqrt(), vb.sqrt())
}

struct Region {
    id: u64,
    center: [f64; 4],
    half: [f64; 4],
    value: f64,
    error: f64,
    split_axis: usize,
}

impl PartialEq for Region {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
    }
}
impl Eq for Region {}
impl PartialOrd for Region {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Region {
    fn cmp(&self, other: &Self) -> Ordering {
        // Worst error first; ties broken by id for determinism.
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.id.cmp(&self.id))
    }
}

fn adaptive<F: Fn(&[f64; 4]) -> f64>(
    f: &F,
    dim: usize,
    half: &[f64; 4],
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    let mut next_id = 0u64;
    let mut heap = BinaryHeap::new();
    let mut total_value = 0.0f64;
    let mut total_error = 0.0f64;
    let mut total_abs = 0.0f64;
    let mut push = |heap: &mut BinaryHeap<Region>,
                    total_value: &mut f64,
                    total_error: &mut f64,
                    total_abs: &mut f64,
                    center: [f64; 4],
                    half: [f64; 4]| {
        let rule = genz_malik(f, dim, &center, &half);
        *total_value += rule.0;
        *total_error += rule.1;
        *total_abs += rule.0.abs();
        heap.push(Region {
            id: next_id,
            center,
            half,
            value: rule.0,
            error: rule.1,
            split_axis: rule.2,
        });
        next_id += 1;
    };

    // Graded initial mesh: panel edges at 0, 1/8, 3/8 and 1 of the half-width
    // per axis, so the central panels match the peak scale of the integrand
    // and sign discontinuities (always at zero) fall on panel boundaries.
    let fractions = [-1.0, -0.375, -0.125, 0.0, 0.125, 0.375, 1.0];
    let mut initial: Vec<([f64; 4], [f64; 4])> = vec![([0.0; 4], *half)];
    for axis in 0..dim {
        let mut split = Vec::with_capacity(initial.len() * (fractions.len() - 1));
        for (c, h) in initial {
            for pair in fractions.windows(2) {
                let (lo, hi) = (pair[0] * half[axis], pair[1] * half[axis]);
                let mut cc = c;
                let mut hh = h;
                cc[axis] = 0.5 * (lo + hi);
                hh[axis] = 0.5 * (hi - lo);
                split.push((cc, hh));
            }
        }
        initial = split;
    }
    for (c, h) in initial {
        push(&mut heap, &mut total_value, &mut total_error, &mut total_abs, c, h);
    }

    loop {
        // Scale the tolerance by the running estimate of integral |f|: for
        // signed mixtures the result may be orders below the integrand's
        // magnitude, and for odd-symmetric weights it may be zero.
        let scale = total_value.abs().max(total_abs).max(f64::MIN_POSITIVE);
        if total_error <= spec.rel_tol * scale {
            return Ok(finish(heap));
        }
        if heap.len() >= spec.max_regions {
            let est = finish(heap);
            return Err(Error::QuadratureNotConverged {
                estimate: est.value,
                bound: est.error_bound,
                regions: est.regions,
            });
        }
        let worst = heap.pop().expect("heap is non-empty");
        total_value -= worst.value;
        total_error -= worst.error;
        total_abs -= worst.value.abs();
        let axis = worst.split_axis;
        let mut h = worst.half;
        h[axis] /= 2.0;
        for side in [-1.0, 1.0] {
            let mut c = worst.center;
            c[axis] += side * h[axis];
            push(&mut heap, &mut total_value, &mut total_error, &mut total_abs, c, h);
        }
    }
}

fn finish(heap: BinaryHeap<Region>) -> Estimate {
    let mut regions: Vec<Region> = heap.into_vec();
    regions.sort_by_key(|r| r.id);
    // Kahan summation in creation order keeps re-runs bit-identical.
    let mut sum = 0.0;
    let mut comp = 0.0;
    for r in &regions {
        let y = r.value - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    let error_bound = regions.iter().map(|r| r.error).sum();
    Estimate {
        value: sum,
        error_bound,
        regions: regions.len(),
    }
}

/// Degree-7 Genz-Malik rule with embedded degree-5 estimate.
/// Returns `(value, error, preferred split axis)`.
fn genz_malik<F: Fn(&[f64; 4]) -> f64>(
    f: &F,
    dim: usize,
    center: &[f64; 4],
    half: &[f64; 4],
) -> (f64, f64, usize) {
    let d = dim as f64;
    let lambda2 = (9.0f64 / 70.0).sqrt();
    let lambda3 = (9.0f64 / 10.0).sqrt();
    let lambda4 = lambda3;
    let lambda5 = (9.0f64 / 19.0).sqrt();

    let w1 = (12824.0 - 9120.0 * d + 400.0 * d * d) / 19683.0;
    let w2 = 980.0 / 6561.0;
    let w3 = (1820.0 - 400.0 * d) / 19683.0;
    let w4 = 200.0 / 19683.0;
    let w5 = 6859.0 / 19683.0 / (1u32 << dim) as f64;
    let we1 = (729.0 - 950.0 * d + 50.0 * d * d) / 729.0;
    let we2 = 245.0 / 486.0;
    let we3 = (265.0 - 100.0 * d) / 1458.0;
    let we4 = 25.0 / 729.0;

    let volume: f64 = half[..dim].iter().map(|h| 2.0 * h).product();

    let f0 = f(center);
    let mut sum2 = 0.0;
    let mut sum3 = 0.0;
    let mut best_axis = 0;
    let mut best_diff = -1.0;
    let ratio = (lambda2 * lambda2) / (lambda3 * lambda3);
    for axis in 0..dim {
        let at = |offset: f64| {
            let mut z = *center;
            z[axis] += offset * half[axis];
            f(&z)
        };
        let s2 = at(lambda2) + at(-lambda2);
        let s3 = at(lambda3) + at(-lambda3);
        sum2 += s2;
        sum3 += s3;
        let diff = ((s2 - 2.0 * f0) - ratio * (s3 - 2.0 * f0)).abs();
        if diff > best_diff {
            best_diff = diff;
            best_axis = axis;
        }
    }

    let mut sum4 = 0.0;
    for i in 0..dim {
        for j in (i + 1)..dim {
            for si in [-1.0, 1.0] {
                for sj in [-1.0, 1.0] {
                    let mut z = *center;
                    z[i] += si * lambda4 * half[i];
                    z[j] += sj * lambda4 * half[j];
                    sum4 += f(&z);
                }
            }
        }
    }

    let mut sum5 = 0.0;
    for corner in 0..(1u32 << dim) {
        let mut z = *center;
        for (axis, zi) in z.iter_mut().enumerate().take(dim) {
            let side = if corner & (1 << axis) != 0 { 1.0 } else { -1.0 };
            *zi += side * lambda5 * half[axis];
        }
        sum5 += f(&z);
    }

    let val7 = volume * (w1 * f0 + w2 * sum2 + w3 * sum3 + w4 * sum4 + w5 * sum5);
    let val5 = volume * (we1 * f0 + we2 * sum2 + we3 * sum3 + we4 * sum4);
    (val7, (val7 - val5).abs(), best_axis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{make_twb_cov, wigner_of_cov, TwbParams};
    use approx::assert_relative_eq;

    #[test]
    fn unit_weight_normalizes_twb() {
        let spec = QuadratureSpec {
            rel_tol: 1e-6,
            ..QuadratureSpec::default()
        };
        for r in [0.0, 0.3, 0.8, 1.5] {
            let state = wigner_of_cov(&make_twb_cov(&TwbParams::new(r).unwrap())).unwrap();
            let est = integrate(&state, IntegrandWeight::Unit, &spec).unwrap();
            assert_relative_eq!(est.value, 1.0, epsilon = 1e-6);
        }
    }

    #[test]
    fn sign_weight_vanishes_for_uncorrelated_vacuum() {
        let state = wigner_of_cov(&make_twb_cov(&TwbParams::new(0.0).unwrap())).unwrap();
        let est = integrate(
            &state,
            IntegrandWeight::QuadrantSign {
                theta: 0.0,
                phi: 0.0,
            },
            &QuadratureSpec {
                rel_tol: 1e-6,
                ..QuadratureSpec::default()
            },
        )
        .unwrap();
        assert!(est.value.abs() < 1e-6, "got {}", est.value);
    }

    #[test]
    fn sign_weight_matches_arcsin_identity_for_twb() {
        // E[sign(x1) sign(x2)] = (2/pi) asin(B0/A0) for the twin-beam.
        let params = TwbParams::new(0.5).unwrap();
        let state = wigner_of_cov(&make_twb_cov(&params)).unwrap();
        let est = integrate(
            &state,
            IntegrandWeight::QuadrantSign {
                theta: 0.0,
                phi: 0.0,
            },
            &QuadratureSpec {
                rel_tol: 1e-6,
                ..QuadratureSpec::default()
            },
        )
        .unwrap();
        let expected =
            2.0 / std::f64::consts::PI * (params.sinh_2r() / params.cosh_2r()).asin();
        assert_relative_eq!(est.value, expected, epsilon = 1e-6);
    }

    #[test]
    fn error_bounds_are_honest_under_tolerance_halving() {
        let state = wigner_of_cov(&make_twb_cov(&TwbParams::new(0.7).unwrap())).unwrap();
        let loose = QuadratureSpec {
            rel_tol: 2e-6,
            ..QuadratureSpec::default()
        };
        let tight = QuadratureSpec {
            rel_tol: 1e-6,
            ..QuadratureSpec::default()
        };
        let a = integrate(&state, IntegrandWeight::Unit, &loose).unwrap();
        let b = integrate(&state, IntegrandWeight::Unit, &tight).unwrap();
        assert!((a.value - b.value).abs() <= a.error_bound);
    }

    #[test]
    fn non_convergence_carries_best_estimate() {
        let state = wigner_of_cov(&make_twb_cov(&TwbParams::new(0.4).unwrap())).unwrap();
        let strangled = QuadratureSpec {
            rel_tol: 1e-14,
            max_regions: 8,
            ..QuadratureSpec::default()
        };
        match integrate(&state, IntegrandWeight::Unit, &strangled) {
            Err(Error::QuadratureNotConverged { estimate, .. }) => {
                assert!((estimate - 1.0).abs() < 0.2);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_spec() {
        let state = wigner_of_cov(&make_twb_cov(&TwbParams::new(0.1).unwrap())).unwrap();
        let bad = QuadratureSpec {
            half_width_sigmas: 3.0,
            ..QuadratureSpec::default()
        };
        assert!(matches!(
            integrate(&state, IntegrandWeight::Unit, &bad),
            Err(Error::InvalidConfig { .. })
        ));
    }

    #[test]
    fn marginal_density_matches_bivariate_gaussian() {
        // Vacuum: P(u1, u2) = (2/pi) exp(-2 u1^2 - 2 u2^2).
        let state = wigner_of_cov(&make_twb_cov(&TwbParams::new(0.0).unwrap())).unwrap();
        let est = marginal_density(&state, 0.3, -0.7, 0.2, -0.1, &QuadratureSpec::default())
            .unwrap();
        let expected =
            2.0 / std::f64::consts::PI * (-2.0 * (0.2f64.powi(2) + 0.1f64.powi(2))).exp();
        assert_relative_eq!(est.value, expected, epsilon = 1e-7);
    }
}
