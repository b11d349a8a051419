//! Displaced-parity (phase-space) Bell test.
//!
//! The displaced-parity correlator is proportional to the Wigner function,
//! `Pi(alpha, beta) = (pi^2 / 4) W(alpha, beta)`, so every quantity here is a
//! pointwise exponential evaluation of the Gaussian sum; no integration is
//! involved.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gaussian::GaussianSumWigner;
use crate::result::{BellResult, BellTest};

/// The four displacement settings of the CHSH combination.
///
/// The parametric family indexed by `J > 0` places them at
/// `alpha_1 = sqrt(J)`, `alpha_2 = -3 sqrt(J)`, `beta_1 = -sqrt(J)`,
/// `beta_2 = 3 sqrt(J)` on the real axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DpGeometry {
    pub alpha1: Complex64,
    pub alpha2: Complex64,
    pub beta1: Complex64,
    pub beta2: Complex64,
}

impl DpGeometry {
    pub fn new(alpha1: Complex64, alpha2: Complex64, beta1: Complex64, beta2: Complex64) -> Self {
        Self {
            alpha1,
            alpha2,
            beta1,
            beta2,
        }
    }

    /// The one-parameter family used for all displaced-parity sweeps.
    pub fn from_j(j: f64) -> Result<Self> {
        if !(j > 0.0) || !j.is_finite() {
            return Err(Error::InvalidConfig {
                field: "J",
                reason: format!("must be positive, got {j}"),
            });
        }
        let root = j.sqrt();
        Ok(Self {
            alpha1: Complex64::new(root, 0.0),
            alpha2: Complex64::new(-3.0 * root, 0.0),
            beta1: Complex64::new(-root, 0.0),
            beta2: Complex64::new(3.0 * root, 0.0),
        })
    }
}

/// Displaced-parity correlator `Pi(alpha, beta) = (pi^2/4) W(alpha, beta)`.
pub fn parity_correlator(state: &GaussianSumWigner, alpha: Complex64, beta: Complex64) -> f64 {
    std::f64::consts::PI.powi(2) / 4.0 * state.value(alpha, beta)
}

/// CHSH combination
/// `B = Pi(a1,b1) + Pi(a2,b1) + Pi(a1,b2) - Pi(a2,b2)`.
pub fn bell_dp(state: &GaussianSumWigner, geom: &DpGeometry) -> BellResult {
    let value = parity_correlator(state, geom.alpha1, geom.beta1)
        + parity_correlator(state, geom.alpha2, geom.beta1)
        + parity_correlator(state, geom.alpha1, geom.beta2)
        - parity_correlator(state, geom.alpha2, geom.beta2);
    BellResult::new(BellTest::Dp, value)
}
