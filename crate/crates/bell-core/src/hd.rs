//! Homodyne Bell test: joint quadrature statistics from the Wigner sum,
//! sign binning, detection-efficiency smearing, CHSH combination.
//!
//! Measuring the rotated quadratures `x_theta` (mode a) and `x_phi` (mode b)
//! marginalizes each Gaussian term over the conjugate quadratures; the term's
//! joint distribution is a signed-mass bivariate Gaussian whose moments are
//! read off the kernel in closed form. Sign binning then turns each term into
//! an orthant probability, `(2/pi) asin(rho)`.

use nalgebra::Matrix2;

use crate::error::{Error, Result};
use crate::gaussian::GaussianSumWigner;
use crate::result::{BellResult, BellTest};

/// Measurement phases and homodyne efficiency for the CHSH combination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HdSettings {
    pub theta1: f64,
    pub theta2: f64,
    pub phi1: f64,
    pub phi2: f64,
    pub eta_h: f64,
}

impl HdSettings {
    pub fn new(theta1: f64, theta2: f64, phi1: f64, phi2: f64, eta_h: f64) -> Result<Self> {
        if !(eta_h > 0.0 && eta_h <= 1.0) {
            return Err(Error::OutOfUnitRange {
                name: "eta_h",
                value: eta_h,
            });
        }
        Ok(Self {
            theta1,
            theta2,
            phi1,
            phi2,
            eta_h,
        })
    }

    /// The standard setting: `theta = {0, pi/2}`, `phi = {-pi/4, pi/4}`,
    /// ideal detection.
    pub fn with_efficiency(eta_h: f64) -> Result<Self> {
        Self::new(
            0.0,
            std::f64::consts::FRAC_PI_2,
            -std::f64::consts::FRAC_PI_4,
            std::f64::consts::FRAC_PI_4,
            eta_h,
        )
    }
}

impl Default for HdSettings {
    fn default() -> Self {
        Self::with_efficiency(1.0).expect("unit efficiency is valid")
    }
}

/// One marginalized Gaussian term: signed mass and the 2x2 covariance of the
/// measured quadrature pair `(x_theta, x_phi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureGaussian {
    pub mass: f64,
    pub cov: Matrix2<f64>,
}

impl QuadratureGaussian {
    pub fn correlation(&self) -> f64 {
        self.cov[(0, 1)] / (self.cov[(0, 0)] * self.cov[(1, 1)]).sqrt()
    }
}

/// Marginalize every Gaussian term onto the rotated quadrature pair.
///
/// Term `exp(-p|a|^2 - q|b|^2 + s(ab + conj))` has per-mode isotropic
/// marginals, so only the angle sum enters: the pair covariance is
/// `[[q, s cos(theta+phi)], [s cos(theta+phi), p]] / (2(pq - s^2))` with mass
/// `weight * pi^2 / (pq - s^2)`. Signed masses sum to the state integral.
pub fn joint_quadrature_gaussians(
    state: &GaussianSumWigner,
    theta: f64,
    phi: f64,
) -> Result<Vec<QuadratureGaussian>> {
    let cos_sum = (theta + phi).cos();
    state
        .terms()
        .iter()
        .enumerate()
        .map(|(k, t)| {
            let d = t.p * t.q - t.s * t.s;
            if !(d > 0.0) || t.p <= 0.0 || t.q <= 0.0 {
                return Err(Error::NotIntegrable { term: k });
            }
            let cov = Matrix2::new(t.q, t.s * cos_sum, t.s * cos_sum, t.p) / (2.0 * d);
            Ok(QuadratureGaussian {
                mass: t.weight * std::f64::consts::PI.powi(2) / d,
                cov,
            })
        })
        .collect()
}

/// Additional quadrature variance from homodyne efficiency `eta_h`: a
/// beam-splitter loss followed by rescaling adds `(1 - eta)/(4 eta)` to each
/// diagonal entry. Sign binning is scale invariant, so the overall rescaling
/// drops out.
fn efficiency_smearing(eta_h: f64) -> f64 {
    (1.0 - eta_h) / (4.0 * eta_h)
}

/// Dichotomized correlator
/// `E(theta, phi) = sum_k mass_k (2/pi) asin(rho_k)` over the
/// efficiency-smeared per-term covariances.
pub fn sign_correlator(state: &GaussianSumWigner, theta: f64, phi: f64, eta_h: f64) -> f64 {
    let smear = efficiency_smearing(eta_h);
    let terms = joint_quadrature_gaussians(state, theta, phi)
        .expect("validated states have integrable terms");
    terms
        .iter()
        .map(|t| {
            let v1 = t.cov[(0, 0)] + smear;
            let v2 = t.cov[(1, 1)] + smear;
            let rho = t.cov[(0, 1)] / (v1 * v2).sqrt();
            t.mass * 2.0 / std::f64::consts::PI * rho.asin()
        })
        .sum()
}

/// CHSH combination
/// `B = E(t1,p1) + E(t1,p2) + E(t2,p1) - E(t2,p2)`.
pub fn bell_hd(state: &GaussianSumWigner, settings: &HdSettings) -> BellResult {
    let e = |theta: f64, phi: f64| sign_correlator(state, theta, phi, settings.eta_h);
    let value = e(settings.theta1, settings.phi1) + e(settings.theta1, settings.phi2)
        + e(settings.theta2, settings.phi1)
        - e(settings.theta2, settings.phi2);
    BellResult::new(BellTest::Hd, value)
}
