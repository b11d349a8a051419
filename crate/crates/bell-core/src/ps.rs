//! Pseudospin CHSH test.
//!
//! The pseudospin triple maps each bosonic mode onto an effective qubit. In
//! the Wigner representation used here the components have the single-mode
//! kernels tagged by [`PseudospinKernel`]; products of `S_z` and `S_x`
//! against a Gaussian-sum state integrate in closed form. With the azimuths
//! fixed at zero the correlator reduces to
//! `E = cos(ta) cos(tb) <Sz Sz> + sin(ta) sin(tb) <Sx Sx>`;
//! the mixed terms vanish by parity for every centered state in scope.

use crate::error::{Error, Result};
use crate::gaussian::GaussianSumWigner;
use crate::ips::IpsCoefficients;
use crate::result::{BellResult, BellTest};
use crate::TwbParams;

/// Symbolic tags for the single-mode pseudospin Wigner kernels:
///
/// * `X`: `(1/pi) sign(Re alpha)`, bounded by `1/pi`;
/// * `Y`: `-(1/(2 pi)) delta(Re alpha) PV(1/Im alpha)`, distributional;
/// * `Z`: `-(1/2) delta^2(alpha)`, distributional.
///
/// Distributional kernels are only ever used inside analytic integrals
/// (point evaluations and parity sums), never integrated numerically.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PseudospinKernel {
    X,
    Y,
    Z,
}

impl PseudospinKernel {
    pub fn is_distributional(&self) -> bool {
        matches!(self, PseudospinKernel::Y | PseudospinKernel::Z)
    }
}

/// Polar measurement angles of the CHSH combination; azimuths are fixed to
/// zero throughout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsAngles {
    pub theta_a1: f64,
    pub theta_a2: f64,
    pub theta_b1: f64,
    pub theta_b2: f64,
}

impl Default for PsAngles {
    fn default() -> Self {
        Self {
            theta_a1: 0.0,
            theta_a2: std::f64::consts::FRAC_PI_2,
            theta_b1: std::f64::consts::FRAC_PI_4,
            theta_b2: -std::f64::consts::FRAC_PI_4,
        }
    }
}

/// Twin-beam correlator:
/// `E = cos(ta) cos(tb) + (2/pi) sin(ta) sin(tb) arctan(sinh 2r)`.
pub fn e_twb(params: &TwbParams, theta_a: f64, theta_b: f64) -> f64 {
    theta_a.cos() * theta_b.cos()
        + 2.0 / std::f64::consts::PI
            * theta_a.sin()
            * theta_b.sin()
            * params.sinh_2r().atan()
}

/// Photon-subtracted correlator from the coefficient table:
/// `E = sum_k (W_k/p11) [cos(ta)cos(tb)/4
///      + 2 sin(ta)sin(tb)/(pi A_k) arctan(s_k / sqrt(A_k))]`
/// with `A_k` the kernel quadratic `(b-f_k)(b-g_k) - s_k^2`.
pub fn e_ips(
    coeffs: &IpsCoefficients,
    p11: f64,
    theta_a: f64,
    theta_b: f64,
) -> Result<f64> {
    let zz_angle = theta_a.cos() * theta_b.cos();
    let xx_angle = theta_a.sin() * theta_b.sin();
    let mut e = 0.0;
    for k in 0..4 {
        let quad = coeffs.term_quadratic(k);
        if quad <= 0.0 {
            return Err(Error::NotIntegrable { term: k });
        }
        let (_, _, s) = coeffs.kernel(k);
        e += coeffs.weight[k] / p11
            * (zz_angle / 4.0
                + 2.0 * xx_angle / (std::f64::consts::PI * quad) * (s / quad.sqrt()).atan());
    }
    Ok(e)
}

/// Pair correlator `<S_a (x) S_b>` of two pseudospin components on a
/// Gaussian-sum state. `Y` components are not implemented (the azimuths are
/// fixed at zero, so no plotted quantity needs them).
pub fn pair_correlator(
    state: &GaussianSumWigner,
    a: PseudospinKernel,
    b: PseudospinKernel,
) -> Result<f64> {
    use PseudospinKernel::*;
    match (a, b) {
        (Z, Z) => Ok(correlator_zz(state)),
        (X, X) => Ok(correlator_xx(state)),
        // The slice of a centered kernel at the origin of one mode is even in
        // the other mode's quadratures, so sign weights integrate to zero.
        (X, Z) | (Z, X) => Ok(0.0),
        _ => Err(Error::UnsupportedKernel),
    }
}

/// `<Sz Sz> = (pi^2/4) W(0, 0)`: both delta kernels fire at the origin and
/// the two parity signs cancel.
fn correlator_zz(state: &GaussianSumWigner) -> f64 {
    std::f64::consts::PI.powi(2) / 4.0 * state.value_xy(0.0, 0.0, 0.0, 0.0)
}

/// `<Sx Sx> = E[sign(x1) sign(x2)]` under the Wigner sum: per term an
/// orthant probability with correlation `s / sqrt(pq)` and mass
/// `weight pi^2 / (pq - s^2)`.
fn correlator_xx(state: &GaussianSumWigner) -> f64 {
    state
        .terms()
        .iter()
        .map(|t| {
            let d = t.p * t.q - t.s * t.s;
            let mass = t.weight * std::f64::consts::PI.powi(2) / d;
            let rho = t.s / (t.p * t.q).sqrt();
            mass * 2.0 / std::f64::consts::PI * rho.asin()
        })
        .sum()
}

/// Generic correlator for any Gaussian-sum state; covers the noise-evolved
/// twin-beam, whose closed form is not otherwise written out.
pub fn correlator_generic(state: &GaussianSumWigner, theta_a: f64, theta_b: f64) -> f64 {
    theta_a.cos() * theta_b.cos() * correlator_zz(state)
        + theta_a.sin() * theta_b.sin() * correlator_xx(state)
}

/// CHSH combination
/// `B = E(a1,b1) + E(a1,b2) + E(a2,b1) - E(a2,b2)` over a correlator source.
pub fn bell_ps<F: Fn(f64, f64) -> f64>(correlator: F, angles: &PsAngles) -> BellResult {
    let value = correlator(angles.theta_a1, angles.theta_b1)
        + correlator(angles.theta_a1, angles.theta_b2)
        + correlator(angles.theta_a2, angles.theta_b1)
        - correlator(angles.theta_a2, angles.theta_b2);
    BellResult::new(BellTest::Ps, value)
}
