//! Reference construction of the photon-subtracted state from first
//! principles: append vacuum ancillas, apply the beam-splitter symplectic to
//! the 8x8 covariance, and condition on the click POVM `I - |0><0|` of each
//! ancilla via Gaussian overlap integrals (Schur complements).
//!
//! This route never touches the closed-form coefficient table of the IPS map,
//! so agreement between the two is a genuine cross-check.

use nalgebra::{DMatrix, Matrix4};

use crate::error::{Error, Result};
use crate::gaussian::TwoModeCovariance;

/// Conditioned state as a signed mixture of centered Gaussians, plus the
/// double-click probability.
#[derive(Debug, Clone)]
pub struct ConditionedGaussianMixture {
    p11: f64,
    /// `(signed mass, covariance)` of each normalized Gaussian component.
    components: Vec<(f64, Matrix4<f64>)>,
}

impl ConditionedGaussianMixture {
    pub fn p11(&self) -> f64 {
        self.p11
    }

    /// Conditioned Wigner function at `(x1, y1, x2, y2)`.
    pub fn wigner_value_xy(&self, x1: f64, y1: f64, x2: f64, y2: f64) -> f64 {
        let z = nalgebra::Vector4::new(x1, y1, x2, y2);
        let mut acc = 0.0;
        for (mass, cov) in &self.components {
            let inv = cov.try_inverse().expect("component covariance invertible");
            let quad = (z.transpose() * inv * z)[(0, 0)];
            let det = cov.determinant();
            let norm = (2.0 * std::f64::consts::PI).powi(2) * det.sqrt();
            acc += mass * (-0.5 * quad).exp() / norm;
        }
        acc / self.p11
    }
}

/// Build the conditioned state for a two-mode Gaussian input and effective
/// transmissivity `tau`.
pub fn conditioned_on_double_click(
    sigma: &TwoModeCovariance,
    tau: f64,
) -> Result<ConditionedGaussianMixture> {
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(Error::OutOfUnitRange {
            name: "tau",
            value: tau,
        });
    }
    // Modes: a = (0,1), b = (2,3), ancilla c = (4,5) pairs with a,
    // ancilla d = (6,7) pairs with b.
    let mut cov8 = DMatrix::<f64>::zeros(8, 8);
    cov8.view_mut((0, 0), (4, 4)).copy_from(sigma.matrix());
    for i in 4..8 {
        cov8[(i, i)] = 0.25;
    }

    let t = tau.sqrt();
    let r = (1.0 - tau).sqrt();
    let mut bs = DMatrix::<f64>::identity(8, 8);
    for (sys, anc) in [(0usize, 4usize), (2, 6)] {
        for off in 0..2 {
            let (i, j) = (sys + off, anc + off);
            bs[(i, i)] = t;
            bs[(i, j)] = r;
            bs[(j, i)] = -r;
            bs[(j, j)] = t;
        }
    }
    let cov = &bs * &cov8 * bs.transpose();

    // Inclusion-exclusion over the two click POVMs E = I - |0><0|.
    let m00 = marginal_component(&cov, &[0, 1, 2, 3], 0);
    let m10 = marginal_component(&cov, &[0, 1, 2, 3, 4, 5], 2);
    let m01 = marginal_component(&cov, &[0, 1, 2, 3, 6, 7], 2);
    let m11 = marginal_component(&cov, &[0, 1, 2, 3, 4, 5, 6, 7], 4);

    let components = vec![
        (m00.0, m00.1),
        (-m10.0, m10.1),
        (-m01.0, m01.1),
        (m11.0, m11.1),
    ];
    let p11: f64 = components.iter().map(|(m, _)| m).sum();
    Ok(ConditionedGaussianMixture { p11, components })
}

/// Marginalize `cov` onto `keep`, then integrate the `n_weighted` trailing
/// variables against the vacuum-projector Gaussian `2^modes * exp(-2 |w|^2)`.
/// Returns the scalar mass and the resulting covariance on the first four
/// (system) variables.
fn marginal_component(cov: &DMatrix<f64>, keep: &[usize], n_weighted: usize) -> (f64, Matrix4<f64>) {
    let n = keep.len();
    let mut sub = DMatrix::<f64>::zeros(n, n);
    for (i, &ki) in keep.iter().enumerate() {
        for (j, &kj) in keep.iter().enumerate() {
            sub[(i, j)] = cov[(ki, kj)];
        }
    }
    if n_weighted == 0 {
        return (1.0, Matrix4::from_fn(|i, j| sub[(i, j)]));
    }

    let nw = n_weighted;
    let nu = n - nw;
    let kappa = 2f64.powi((nw / 2) as i32);
    let precision = sub
        .clone()
        .try_inverse()
        .expect("marginal covariance invertible");
    let p_uu = precision.view((0, 0), (nu, nu)).into_owned();
    let p_uw = precision.view((0, nu), (nu, nw)).into_owned();
    let p_ww = precision.view((nu, nu), (nw, nw)).into_owned();
    let shifted = &p_ww + DMatrix::<f64>::identity(nw, nw) * 4.0;
    let shifted_inv = shifted.clone().try_inverse().expect("shifted precision invertible");
    let schur = &p_uu - &p_uw * &shifted_inv * p_uw.transpose();
    let v_kept = schur.clone().try_inverse().expect("Schur complement invertible");

    let mass =
        kappa * (v_kept.determinant() / sub.determinant()).sqrt() / shifted.determinant().sqrt();
    (mass, Matrix4::from_fn(|i, j| v_kept[(i, j)]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{make_twb_cov, TwbParams};

    #[test]
    fn perfect_transmission_never_clicks() {
        let sigma = make_twb_cov(&TwbParams::new(0.8).unwrap());
        let mix = conditioned_on_double_click(&sigma, 1.0).unwrap();
        assert!(mix.p11().abs() < 1e-12);
    }

    #[test]
    fn vacuum_never_clicks() {
        let sigma = make_twb_cov(&TwbParams::new(0.0).unwrap());
        let mix = conditioned_on_double_click(&sigma, 0.7).unwrap();
        assert!(mix.p11().abs() < 1e-12);
    }

    #[test]
    fn click_probability_grows_with_reflection() {
        let sigma = make_twb_cov(&TwbParams::new(0.6).unwrap());
        let mut last = 0.0;
        for tau in [0.99, 0.9, 0.8, 0.7] {
            let p = conditioned_on_double_click(&sigma, tau).unwrap().p11();
            assert!(p > last);
            last = p;
        }
    }
}
