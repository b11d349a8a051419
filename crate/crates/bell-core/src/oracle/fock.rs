//! Fock-truncation expectation values for squeezed-thermal states.
//!
//! The evolved twin-beam is a two-mode squeezer applied to a thermal product,
//! so every state in scope expands as a mixture of squeezed number pairs
//! `S2 |n, m>`. Expectations are evaluated by truncating that expansion at a
//! photon-number cutoff and are convergence-checked by re-running with the
//! cutoff raised by ten.
//!
//! Operator matrix elements used here: the pseudospin `S_z` is (minus) the
//! photon-number parity, `S_x` is `sign(x)` with matrix elements
//! `integral sign(x) psi_k(x) psi_l(x) dx` over the oscillator wavefunctions,
//! and the displaced parity is `D(2 alpha) (-1)^n` with the standard Laguerre
//! form for displacement matrix elements.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gaussian::EffectiveDecomposition;

/// Thermal-mixture weights below this fraction of the total are dropped.
const THERMAL_TAIL: f64 = 1e-16;

/// Truncation controls for the Fock oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockSpec {
    /// Photon-number cutoff per mode.
    pub cutoff: usize,
    /// Maximum allowed change of the result when the cutoff increases by 10.
    pub convergence_tol: f64,
}

impl Default for FockSpec {
    fn default() -> Self {
        Self {
            cutoff: 40,
            convergence_tol: 1e-6,
        }
    }
}

/// Operator whose expectation value is computed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FockOperator {
    /// Photon-number parity on both modes (equals `S_z (x) S_z`).
    ParityProduct,
    /// Displaced parity `D(alpha) P D^+(alpha) (x) D(beta) P D^+(beta)`.
    DisplacedParity { alpha: Complex64, beta: Complex64 },
    /// `S_x (x) S_x = sign(x_1) sign(x_2)`.
    PseudospinXx,
}

/// Truncated expectation value on the squeezed-thermal state described by
/// `decomp`, convergence-checked against a cutoff raised by ten.
pub fn fock_expectation(
    decomp: &EffectiveDecomposition,
    op: &FockOperator,
    spec: &FockSpec,
) -> Result<f64> {
    if spec.cutoff < 2 {
        return Err(Error::InvalidConfig {
            field: "cutoff",
            reason: format!("must be at least 2, got {}", spec.cutoff),
        });
    }
    if !decomp.is_physical() {
        return Err(Error::NonPhysical(format!(
            "thermal occupancy m2 = {} is negative",
            decomp.m2
        )));
    }
    let coarse = expectation_at(decomp, op, spec.cutoff);
    let fine = expectation_at(decomp, op, spec.cutoff + 10);
    let delta = (fine - coarse).abs();
    if delta >= spec.convergence_tol {
        return Err(Error::FockNotConverged {
            cutoff: spec.cutoff,
            delta,
        });
    }
    Ok(fine)
}

fn expectation_at(decomp: &EffectiveDecomposition, op: &FockOperator, cutoff: usize) -> f64 {
    let lnf = ln_factorials(2 * cutoff + 2);
    let w1 = thermal_weights(decomp.m1, cutoff);
    let w2 = thermal_weights(decomp.m2, cutoff);

    let sign_matrix = match op {
        FockOperator::PseudospinXx => Some(sign_overlap_matrix(cutoff)),
        _ => None,
    };
    let displaced = match op {
        FockOperator::DisplacedParity { alpha, beta } => Some((
            displaced_parity_matrix(*alpha, cutoff),
            displaced_parity_matrix(*beta, cutoff),
        )),
        _ => None,
    };

    let mut total = 0.0;
    for (n, &wn) in w1.iter().enumerate() {
        for (m, &wm) in w2.iter().enumerate() {
            let weight = wn * wm;
            if weight < THERMAL_TAIL {
                continue;
            }
            let amps = squeezed_pair_amplitudes(n, m, decomp.xi_mod, cutoff, &lnf);
            let value = match op {
                FockOperator::ParityProduct => {
                    // S2 shifts both photon numbers together, so the joint
                    // parity is (-1)^(n+m) times the retained norm.
                    let norm: f64 = amps.iter().map(|(_, _, c)| c * c).sum();
                    if (n + m) % 2 == 0 {
                        norm
                    } else {
                        -norm
                    }
                }
                FockOperator::PseudospinXx => {
                    let sx = sign_matrix.as_ref().expect("sign matrix prepared");
                    let mut acc = 0.0;
                    for &(ka, kb, c) in &amps {
                        for &(ka2, kb2, c2) in &amps {
                            acc += c * c2 * sx[(ka2, ka)] * sx[(kb2, kb)];
                        }
                    }
                    acc
                }
                FockOperator::DisplacedParity { .. } => {
                    let (da, db) = displaced.as_ref().expect("displacement matrices prepared");
                    let mut acc = Complex64::new(0.0, 0.0);
                    for &(ka, kb, c) in &amps {
                        for &(ka2, kb2, c2) in &amps {
                            acc += c * c2 * da[(ka2, ka)] * db[(kb2, kb)];
                        }
                    }
                    acc.re
                }
            };
            total += weight * value;
        }
    }
    total
}

/// Geometric thermal weights `M^n / (1+M)^(n+1)`, truncated at the cutoff or
/// once the tail is negligible.
fn thermal_weights(mean: f64, cutoff: usize) -> Vec<f64> {
    if mean <= 0.0 {
        return vec![1.0];
    }
    let ratio = mean / (1.0 + mean);
    let mut weights = Vec::new();
    let mut w = 1.0 / (1.0 + mean);
    for _ in 0..=cutoff {
        weights.push(w);
        w *= ratio;
        if w < THERMAL_TAIL {
            break;
        }
    }
    weights
}

/// Amplitudes of `S2(zeta) |n, m> = sum_d c_d |n+d, m+d>` clipped to the
/// cutoff, returned as `(n+d, m+d, c_d)`. Uses the normal-ordered
/// factorization of the two-mode squeezer with `gamma = tanh(zeta)`.
fn squeezed_pair_amplitudes(
    n: usize,
    m: usize,
    zeta: f64,
    cutoff: usize,
    lnf: &[f64],
) -> Vec<(usize, usize, f64)> {
    let gamma = zeta.tanh();
    if gamma < 1e-300 {
        return if n <= cutoff && m <= cutoff {
            vec![(n, m, 1.0)]
        } else {
            vec![]
        };
    }
    let ln_gamma = gamma.ln();
    let ln_cosh = zeta.cosh().ln();

    let d_min = -(n.min(m) as i64);
    let d_max = cutoff as i64 - n.max(m) as i64;
    let mut amps = Vec::new();
    for d in d_min..=d_max {
        let ka = (n as i64 + d) as usize;
        let kb = (m as i64 + d) as usize;
        let mut sum = 0.0;
        let j_lo = (-d).max(0) as usize;
        for j in j_lo..=n.min(m) {
            let jd = (j as i64 + d) as usize;
            // sech * gamma^(2j+d) * cosh^(2j-n-m) * sqrt(n! m! ka! kb!)
            //   / (j! (j+d)! (n-j)! (m-j)!), alternating in j.
            let ln_mag = (2 * j as i64 + d) as f64 * ln_gamma
                + (2.0 * j as f64 - (n + m) as f64 - 1.0) * ln_cosh
                + 0.5 * (lnf[n] + lnf[m] + lnf[ka] + lnf[kb])
                - lnf[j]
                - lnf[jd]
                - lnf[n - j]
                - lnf[m - j];
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            sum += sign * ln_mag.exp();
        }
        amps.push((ka, kb, sum));
    }
    amps
}

/// Natural logs of factorials `0! ..= max!`.
fn ln_factorials(max: usize) -> Vec<f64> {
    let mut lnf = vec![0.0; max + 1];
    for k in 1..=max {
        lnf[k] = lnf[k - 1] + (k as f64).ln();
    }
    lnf
}

/// Matrix elements `integral sign(x) psi_k psi_l dx` (zero unless `k + l`
/// odd), computed by composite Simpson on the half line and doubled.
fn sign_overlap_matrix(cutoff: usize) -> nalgebra::DMatrix<f64> {
    let dim = cutoff + 1;
    let x_max = ((2 * cutoff + 1) as f64).sqrt() / std::f64::consts::SQRT_2 + 6.0;
    let panels = 4000usize; // even panel count for Simpson weights
    let dx = x_max / panels as f64;

    let mut accum = nalgebra::DMatrix::<f64>::zeros(dim, dim);
    for i in 0..=panels {
        let x = i as f64 * dx;
        let w = if i == 0 || i == panels {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let psi = oscillator_wavefunctions(x, cutoff);
        for k in 0..dim {
            for l in (k + 1)..dim {
                if (k + l) % 2 == 1 {
                    accum[(k, l)] += w * psi[k] * psi[l];
                }
            }
        }
    }
    let scale = 2.0 * dx / 3.0;
    let mut out = nalgebra::DMatrix::<f64>::zeros(dim, dim);
    for k in 0..dim {
        for l in (k + 1)..dim {
            if (k + l) % 2 == 1 {
                let v = scale * accum[(k, l)];
                out[(k, l)] = v;
                out[(l, k)] = v;
            }
        }
    }
    out
}

/// Harmonic-oscillator wavefunctions `psi_0..=psi_cutoff` at `x`, in the
/// convention with vacuum variance 1/4 (`psi_k(x) = 2^(1/4) phi_k(sqrt(2) x)`
/// for unit-variance Hermite functions `phi`).
fn oscillator_wavefunctions(x: f64, cutoff: usize) -> Vec<f64> {
    let q = std::f64::consts::SQRT_2 * x;
    let mut psi = vec![0.0; cutoff + 1];
    let phi0 = std::f64::consts::PI.powf(-0.25) * (-0.5 * q * q).exp();
    psi[0] = phi0;
    if cutoff >= 1 {
        psi[1] = std::f64::consts::SQRT_2 * q * phi0;
    }
    for k in 2..=cutoff {
        psi[k] = (2.0 / k as f64).sqrt() * q * psi[k - 1]
            - ((k - 1) as f64 / k as f64).sqrt() * psi[k - 2];
    }
    let scale = 2f64.powf(0.25);
    for v in &mut psi {
        *v *= scale;
    }
    psi
}

/// Matrix of the displaced parity `D(2 alpha) (-1)^n`:
/// `<k| D(beta) |l> (-1)^l` with `beta = 2 alpha`.
fn displaced_parity_matrix(alpha: Complex64, cutoff: usize) -> nalgebra::DMatrix<Complex64> {
    let beta = 2.0 * alpha;
    let dim = cutoff + 1;
    let lnf = ln_factorials(dim);
    let b2 = beta.norm_sqr();
    let mut out = nalgebra::DMatrix::<Complex64>::zeros(dim, dim);
    for k in 0..dim {
        for l in 0..dim {
            let (hi, lo) = (k.max(l), k.min(l));
            let diff = (hi - lo) as i32;
            let lag = laguerre(lo, diff as f64, b2);
            let ln_ratio = 0.5 * (lnf[lo] - lnf[hi]);
            let radial = (ln_ratio - 0.5 * b2).exp() * lag;
            let angular = if k >= l {
                beta.powi(diff)
            } else {
                (-beta.conj()).powi(diff)
            };
            let parity = if l % 2 == 0 { 1.0 } else { -1.0 };
            out[(k, l)] = angular * radial * parity;
        }
    }
    out
}

/// Generalized Laguerre polynomial `L_n^(a)(x)` by the three-term recurrence.
fn laguerre(n: usize, a: f64, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut lm1 = 1.0;
    let mut l = 1.0 + a - x;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + a - x) * l - (kf + a) * lm1) / (kf + 1.0);
        lm1 = l;
        l = next;
    }
    l
}
