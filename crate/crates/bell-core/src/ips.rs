//! Inconclusive photon subtraction (IPS): each mode is mixed with the vacuum
//! at an unbalanced beam splitter and the reflected beam hits an on/off
//! detector; the state is kept when both detectors click. Beam-splitter
//! transmissivity `T` and detector efficiency `eta` merge into the effective
//! transmissivity `tau = 1 - eta (1 - T)` followed by ideal detection.
//!
//! Acting on a single-Gaussian input in twin-beam form the map produces a
//! four-term Gaussian sum (inclusion-exclusion over the two detectors) and
//! the double-click probability `p11`.

use crate::error::{Error, Result};
use crate::gaussian::{GaussianSumWigner, GaussianTerm, TwbWignerForm};

/// Conditioning below this double-click probability is numerically
/// meaningless and reported as a no-click regime.
pub const P11_MIN: f64 = 1e-12;

/// Beam-splitter transmissivity and APD efficiency of the subtraction stage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IpsParams {
    transmissivity: f64,
    apd_efficiency: f64,
}

impl IpsParams {
    pub fn new(transmissivity: f64, apd_efficiency: f64) -> Result<Self> {
        for (name, value) in [
            ("transmissivity", transmissivity),
            ("apd_efficiency", apd_efficiency),
        ] {
            if !value.is_finite() || value <= 0.0 || value > 1.0 {
                return Err(Error::OutOfUnitRange { name, value });
            }
        }
        Ok(Self {
            transmissivity,
            apd_efficiency,
        })
    }

    /// Parameters with the given effective transmissivity (ideal detectors).
    pub fn from_tau(tau: f64) -> Result<Self> {
        Self::new(tau, 1.0)
    }

    pub fn transmissivity(&self) -> f64 {
        self.transmissivity
    }

    pub fn apd_efficiency(&self) -> f64 {
        self.apd_efficiency
    }

    /// Effective transmissivity `tau = 1 - eta (1 - T)`.
    pub fn tau(&self) -> f64 {
        1.0 - self.apd_efficiency * (1.0 - self.transmissivity)
    }
}

/// `tau = 1 - eta (1 - T)` with both inputs in `(0, 1]`.
pub fn effective_transmissivity(transmissivity: f64, apd_efficiency: f64) -> Result<f64> {
    Ok(IpsParams::new(transmissivity, apd_efficiency)?.tau())
}

/// Detector inclusion-exclusion signs: identity, single no-click (twice),
/// double no-click.
pub const DETECTOR_SIGNS: [f64; 4] = [1.0, -2.0, -2.0, 4.0];

/// Coefficient table of the four-term IPS Gaussian sum.
///
/// For `k = 1..4` the kernel of term `k` is
/// `exp{-(b - f_k)|alpha|^2 - (b - g_k)|beta|^2 + (2 b_tilde tau + h_k)(alpha beta + conj)}`
/// with signed prefactor `weight_k / (pi^2 p11)`.
#[derive(Debug, Clone, PartialEq)]
pub struct IpsCoefficients {
    /// `a = 2 [a_tilde (1 - tau) + tau]`.
    pub a: f64,
    /// `b = 2 [a_tilde tau + (1 - tau)]`.
    pub b: f64,
    /// `x_k`: `{a, a+2, a, a+2}`.
    pub x: [f64; 4],
    /// `y_k`: `{a, a, a+2, a+2}`.
    pub y: [f64; 4],
    /// `N_k = 4 tau (1 - tau) / (x_k y_k - 4 b_tilde^2 (1 - tau)^2)`.
    pub norm: [f64; 4],
    pub f: [f64; 4],
    pub g: [f64; 4],
    pub h: [f64; 4],
    /// Signed weights `C_k / (sqrt(det sigma) (x_k y_k - 4 b_tilde^2 (1-tau)^2))`.
    pub weight: [f64; 4],
    /// Shared kernel cross coefficient base `2 b_tilde tau`.
    pub cross: f64,
}

impl IpsCoefficients {
    /// Kernel exponents `(p, q, s)` of term `k` (0-based).
    pub fn kernel(&self, k: usize) -> (f64, f64, f64) {
        (self.b - self.f[k], self.b - self.g[k], self.cross + self.h[k])
    }

    /// Quadratic-form determinant `A_k = p_k q_k - s_k^2` of term `k`.
    pub fn term_quadratic(&self, k: usize) -> f64 {
        let (p, q, s) = self.kernel(k);
        p * q - s * s
    }

    /// Double-click probability `p11 = sum_k weight_k / A_k`.
    pub fn p11(&self) -> f64 {
        (0..4).map(|k| self.weight[k] / self.term_quadratic(k)).sum()
    }
}

/// Evaluate the IPS coefficient families for a single-Gaussian input in
/// twin-beam form.
pub fn ips_coefficients(input: &TwbWignerForm, ips: &IpsParams) -> Result<IpsCoefficients> {
    let tau = ips.tau();
    let at = input.a_tilde;
    let bt = input.b_tilde;
    if !(at > bt.abs()) {
        return Err(Error::NotPositiveDefinite);
    }

    let a = 2.0 * (at * (1.0 - tau) + tau);
    let b = 2.0 * (at * tau + (1.0 - tau));
    let x = [a, a + 2.0, a, a + 2.0];
    let y = [a, a, a + 2.0, a + 2.0];

    let one_minus_at = 1.0 - at;
    let bt2 = bt * bt;
    let refl = 1.0 - tau;

    let mut norm = [0.0; 4];
    let mut f = [0.0; 4];
    let mut g = [0.0; 4];
    let mut h = [0.0; 4];
    let mut weight = [0.0; 4];
    for k in 0..4 {
        let denom = x[k] * y[k] - 4.0 * bt2 * refl * refl;
        if denom <= 0.0 {
            return Err(Error::NotIntegrable { term: k });
        }
        norm[k] = 4.0 * tau * refl / denom;
        f[k] = norm[k]
            * (x[k] * bt2 + 4.0 * bt2 * one_minus_at * refl + y[k] * one_minus_at * one_minus_at);
        g[k] = norm[k]
            * (x[k] * one_minus_at * one_minus_at + 4.0 * bt2 * one_minus_at * refl + y[k] * bt2);
        h[k] = norm[k]
            * ((x[k] + y[k]) * bt * one_minus_at
                + 2.0 * bt * (bt2 + one_minus_at * one_minus_at) * refl);
        weight[k] = DETECTOR_SIGNS[k] / (input.sqrt_det * denom);
    }

    let coeffs = IpsCoefficients {
        a,
        b,
        x,
        y,
        norm,
        f,
        g,
        h,
        weight,
        cross: 2.0 * bt * tau,
    };
    for k in 0..4 {
        let (p, q, _) = coeffs.kernel(k);
        if p <= 0.0 || q <= 0.0 || coeffs.term_quadratic(k) <= 0.0 {
            return Err(Error::NotIntegrable { term: k });
        }
    }
    Ok(coeffs)
}

/// Apply the IPS map to a single-Gaussian state in twin-beam form.
///
/// Returns the normalized four-term state together with the double-click
/// probability `p11`; conditioning on `p11 <= 1e-12` is rejected as a
/// no-click regime.
pub fn ips_state(
    input: &GaussianSumWigner,
    ips: &IpsParams,
) -> Result<(GaussianSumWigner, f64)> {
    let form = TwbWignerForm::from_wigner(input)?;
    let coeffs = ips_coefficients(&form, ips)?;
    let p11 = coeffs.p11();
    if p11 <= P11_MIN {
        return Err(Error::NoClickRegime { p11, min: P11_MIN });
    }
    let norm = std::f64::consts::PI.powi(2) * p11;
    let terms = (0..4)
        .map(|k| {
            let (p, q, s) = coeffs.kernel(k);
            GaussianTerm {
                weight: coeffs.weight[k] / norm,
                p,
                q,
                s,
            }
        })
        .collect();
    Ok((GaussianSumWigner::new(terms)?, p11))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{
        evolve_cov, make_twb_cov, wigner_of_cov, ChannelParams, TwbParams,
    };
    use crate::oracle::quadrature::{integrate, IntegrandWeight, QuadratureSpec};
    use approx::assert_relative_eq;

    fn twb_state(r: f64) -> GaussianSumWigner {
        wigner_of_cov(&make_twb_cov(&TwbParams::new(r).unwrap())).unwrap()
    }

    #[test]
    fn effective_transmissivity_examples() {
        assert_relative_eq!(effective_transmissivity(1.0, 0.3).unwrap(), 1.0);
        assert_relative_eq!(effective_transmissivity(0.9, 1.0).unwrap(), 0.9);
        assert_relative_eq!(effective_transmissivity(0.99, 0.5).unwrap(), 0.995);
    }

    #[test]
    fn out_of_range_parameters_rejected() {
        assert!(effective_transmissivity(0.0, 0.5).is_err());
        assert!(effective_transmissivity(0.5, 1.2).is_err());
        assert!(effective_transmissivity(-0.1, 0.5).is_err());
    }

    #[test]
    fn unit_tau_kills_reflection_families() {
        let form = TwbWignerForm::from_twb(&TwbParams::new(0.4).unwrap());
        let ips = IpsParams::from_tau(1.0).unwrap();
        let coeffs = ips_coefficients(&form, &ips).unwrap();
        for k in 0..4 {
            assert_eq!(coeffs.norm[k], 0.0);
            assert_eq!(coeffs.f[k], 0.0);
            assert_eq!(coeffs.g[k], 0.0);
            assert_eq!(coeffs.h[k], 0.0);
        }
        // Perfect transmission never clicks: exact cancellation of the four terms.
        assert!(coeffs.p11().abs() < 1e-15);
        assert!(matches!(
            ips_state(&twb_state(0.4), &ips),
            Err(Error::NoClickRegime { .. })
        ));
    }

    #[test]
    fn vacuum_input_never_clicks() {
        let ips = IpsParams::from_tau(0.9).unwrap();
        let form = TwbWignerForm::from_twb(&TwbParams::new(0.0).unwrap());
        let coeffs = ips_coefficients(&form, &ips).unwrap();
        assert!(coeffs.p11().abs() < 1e-15);
        assert!(matches!(
            ips_state(&twb_state(0.0), &ips),
            Err(Error::NoClickRegime { .. })
        ));
    }

    #[test]
    fn coefficient_table_invariants() {
        let form = TwbWignerForm::from_twb(&TwbParams::new(0.3).unwrap());
        let coeffs =
            ips_coefficients(&form, &IpsParams::from_tau(0.9999).unwrap()).unwrap();
        assert_relative_eq!(coeffs.x[0], coeffs.a);
        assert_relative_eq!(coeffs.x[2], coeffs.a);
        assert_relative_eq!(coeffs.y[0], coeffs.a);
        assert_relative_eq!(coeffs.y[1], coeffs.a);
        assert_relative_eq!(coeffs.x[1], coeffs.a + 2.0);
        assert_relative_eq!(coeffs.x[3], coeffs.a + 2.0);
        assert_relative_eq!(coeffs.y[2], coeffs.a + 2.0);
        assert_relative_eq!(coeffs.y[3], coeffs.a + 2.0);
        for k in 0..4 {
            assert!(coeffs.term_quadratic(k) > 0.0);
        }
    }

    #[test]
    fn ips_state_normalizes_analytically_and_by_quadrature() {
        let (state, p11) =
            ips_state(&twb_state(0.5), &IpsParams::from_tau(0.99).unwrap()).unwrap();
        assert!(p11 > 0.0 && p11 < 1.0);
        assert_relative_eq!(state.integral(), 1.0, epsilon = 1e-10);
        let spec = QuadratureSpec {
            rel_tol: 1e-6,
            ..QuadratureSpec::default()
        };
        let est = integrate(&state, IntegrandWeight::Unit, &spec).unwrap();
        assert_relative_eq!(est.value, 1.0, epsilon = 1e-6);
    }

    #[test]
    fn noiseless_evolution_matches_raw_input_term_by_term() {
        let ips = IpsParams::from_tau(0.95).unwrap();
        let raw = twb_state(0.7);
        let evolved =
            wigner_of_cov(&evolve_cov(&make_twb_cov(&TwbParams::new(0.7).unwrap()),
                &ChannelParams::ideal()))
            .unwrap();
        let (state_raw, p_raw) = ips_state(&raw, &ips).unwrap();
        let (state_evolved, p_evolved) = ips_state(&evolved, &ips).unwrap();
        assert_relative_eq!(p_raw, p_evolved, epsilon = 1e-12);
        for (t1, t2) in state_raw.terms().iter().zip(state_evolved.terms()) {
            assert_relative_eq!(t1.weight, t2.weight, max_relative = 1e-12);
            assert_relative_eq!(t1.p, t2.p, max_relative = 1e-12);
            assert_relative_eq!(t1.q, t2.q, max_relative = 1e-12);
            assert_relative_eq!(t1.s, t2.s, max_relative = 1e-12);
        }
    }

    #[test]
    fn p11_increases_as_tau_decreases() {
        let form = TwbWignerForm::from_twb(&TwbParams::new(0.6).unwrap());
        let mut last = 0.0;
        for tau in [0.999, 0.99, 0.95, 0.9, 0.8, 0.6] {
            let p11 = ips_coefficients(&form, &IpsParams::from_tau(tau).unwrap())
                .unwrap()
                .p11();
            assert!(p11 > last, "p11 not increasing at tau={tau}");
            assert!(p11 <= 1.0);
            last = p11;
        }
    }

    #[test]
    fn ips_rejects_multi_term_input() {
        let (state, _) =
            ips_state(&twb_state(0.5), &IpsParams::from_tau(0.9).unwrap()).unwrap();
        assert!(matches!(
            ips_state(&state, &IpsParams::from_tau(0.9).unwrap()),
            Err(Error::NotTwbForm { .. })
        ));
    }
}
