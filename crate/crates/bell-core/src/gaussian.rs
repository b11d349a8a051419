//! Twin-beam covariance matrices, lossy thermal-channel evolution and the
//! Gaussian-sum Wigner representation.
//!
//! Conventions used throughout the crate: `alpha = x + i y` per mode, vacuum
//! quadrature variance 1/4 (so the vacuum covariance matrix is `I/4`) and
//! Wigner functions normalized to unit integral over `d^2 alpha d^2 beta`.
//! Quadrature ordering is `(x1, y1, x2, y2)`.

use nalgebra::Matrix4;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance used when checking structural properties of covariance matrices.
const STRUCT_TOL: f64 = 1e-10;

/// Twin-beam squeezing parameter `r >= 0`.
///
/// The twin-beam state is the two-mode squeezed vacuum with
/// `lambda = tanh(r)`; its covariance blocks are governed by
/// `cosh(2r)` and `sinh(2r)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwbParams {
    r: f64,
}

impl TwbParams {
    pub fn new(r: f64) -> Result<Self> {
        if !r.is_finite() || r < 0.0 {
            return Err(Error::NegativeParameter {
                name: "r",
                value: r,
            });
        }
        Ok(Self { r })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// Fock-expansion ratio `lambda = tanh(r)`, in `[0, 1)`.
    pub fn lambda(&self) -> f64 {
        self.r.tanh()
    }

    /// Diagonal-block scale `cosh(2r)`.
    pub fn cosh_2r(&self) -> f64 {
        (2.0 * self.r).cosh()
    }

    /// Off-diagonal-block scale `sinh(2r)`.
    pub fn sinh_2r(&self) -> f64 {
        (2.0 * self.r).sinh()
    }
}

/// Lossy thermal channel acting independently on the two modes.
///
/// Damping enters only through the dimensionless exposures `gt_k` (rate times
/// time); `n_k` is the mean thermal photon number of environment `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    pub gt1: f64,
    pub gt2: f64,
    pub n1: f64,
    pub n2: f64,
}

impl ChannelParams {
    pub fn new(gt1: f64, gt2: f64, n1: f64, n2: f64) -> Result<Self> {
        for (name, value) in [("gt1", gt1), ("gt2", gt2), ("n1", n1), ("n2", n2)] {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::NegativeParameter { name, value });
            }
        }
        Ok(Self { gt1, gt2, n1, n2 })
    }

    /// Equal damping and equal thermal occupancy on both modes.
    pub fn symmetric(gt: f64, n: f64) -> Result<Self> {
        Self::new(gt, gt, n, n)
    }

    /// The identity channel (no damping, no thermal noise).
    pub fn ideal() -> Self {
        Self {
            gt1: 0.0,
            gt2: 0.0,
            n1: 0.0,
            n2: 0.0,
        }
    }

    pub fn is_symmetric(&self) -> bool {
        (self.gt1 - self.gt2).abs() <= STRUCT_TOL && (self.n1 - self.n2).abs() <= STRUCT_TOL
    }

    /// Asymptotic (environment) covariance matrix.
    pub fn sigma_infinity(&self) -> TwoModeCovariance {
        let v1 = (1.0 + 2.0 * self.n1) / 4.0;
        let v2 = (1.0 + 2.0 * self.n2) / 4.0;
        TwoModeCovariance {
            m: Matrix4::from_diagonal(&nalgebra::Vector4::new(v1, v1, v2, v2)),
        }
    }
}

/// Block parameters `(a1, a2, b)` of a twin-beam-form covariance matrix
/// `sigma = (1/4) [[a1*I, b*s3], [b*s3, a2*I]]` with `s3 = diag(1, -1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovBlocks {
    pub a1: f64,
    pub a2: f64,
    pub b: f64,
}

/// 4x4 real symmetric covariance matrix over `(x1, y1, x2, y2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoModeCovariance {
    m: Matrix4<f64>,
}

impl TwoModeCovariance {
    /// Wrap an arbitrary symmetric matrix with positive determinant.
    pub fn from_matrix(m: Matrix4<f64>) -> Result<Self> {
        let sym_dev = (m - m.transpose()).abs().max();
        if sym_dev > STRUCT_TOL || !m.iter().all(|v| v.is_finite()) {
            return Err(Error::NotPositiveDefinite);
        }
        if m.determinant() <= 0.0 {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(Self { m })
    }

    /// Build from twin-beam block parameters.
    pub fn from_blocks(blocks: CovBlocks) -> Self {
        let CovBlocks { a1, a2, b } = blocks;
        let mut m = Matrix4::zeros();
        m[(0, 0)] = a1 / 4.0;
        m[(1, 1)] = a1 / 4.0;
        m[(2, 2)] = a2 / 4.0;
        m[(3, 3)] = a2 / 4.0;
        m[(0, 2)] = b / 4.0;
        m[(2, 0)] = b / 4.0;
        m[(1, 3)] = -b / 4.0;
        m[(3, 1)] = -b / 4.0;
        Self { m }
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.m
    }

    pub fn determinant(&self) -> f64 {
        self.m.determinant()
    }

    pub fn sqrt_determinant(&self) -> f64 {
        self.determinant().sqrt()
    }

    /// Extract `(a1, a2, b)` if the matrix has the twin-beam block form.
    pub fn blocks(&self) -> Result<CovBlocks> {
        let m = &self.m;
        let scale = m.abs().max().max(1.0);
        let tol = STRUCT_TOL * scale;
        let zero_positions = [(0, 1), (0, 3), (1, 2), (2, 3)];
        for (i, j) in zero_positions {
            if m[(i, j)].abs() > tol {
                return Err(Error::NotBlockForm);
            }
        }
        if (m[(0, 0)] - m[(1, 1)]).abs() > tol
            || (m[(2, 2)] - m[(3, 3)]).abs() > tol
            || (m[(0, 2)] + m[(1, 3)]).abs() > tol
        {
            return Err(Error::NotBlockForm);
        }
        Ok(CovBlocks {
            a1: 4.0 * m[(0, 0)],
            a2: 4.0 * m[(2, 2)],
            b: 4.0 * m[(0, 2)],
        })
    }

    /// Positive definiteness via leading principal minors.
    pub fn is_positive_definite(&self) -> bool {
        let m = &self.m;
        let d1 = m[(0, 0)];
        let d2 = m.fixed_view::<2, 2>(0, 0).determinant();
        let d3 = m.fixed_view::<3, 3>(0, 0).determinant();
        let d4 = m.determinant();
        d1 > 0.0 && d2 > 0.0 && d3 > 0.0 && d4 > 0.0
    }
}

/// One centered Gaussian kernel `weight * exp(-p|alpha|^2 - q|beta|^2
/// + s(alpha*beta + conj(alpha)*conj(beta)))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianTerm {
    pub weight: f64,
    /// Coefficient of `|alpha|^2`.
    pub p: f64,
    /// Coefficient of `|beta|^2`.
    pub q: f64,
    /// Coefficient of `alpha*beta + conj(alpha*beta)`.
    pub s: f64,
}

impl GaussianTerm {
    /// Integral of the bare kernel over the full phase space,
    /// `pi^2 / (p q - s^2)`, times the weight.
    pub fn integral(&self) -> f64 {
        self.weight * std::f64::consts::PI.powi(2) / (self.p * self.q - self.s * self.s)
    }

    pub fn value_xy(&self, x1: f64, y1: f64, x2: f64, y2: f64) -> f64 {
        let exponent = -self.p * (x1 * x1 + y1 * y1) - self.q * (x2 * x2 + y2 * y2)
            + 2.0 * self.s * (x1 * x2 - y1 * y2);
        self.weight * exponent.exp()
    }

    fn is_integrable(&self) -> bool {
        self.p > 0.0 && self.q > 0.0 && self.p * self.q > self.s * self.s
    }
}

/// Finite weighted sum of centered two-mode Gaussian kernels; exactly
/// represents the twin-beam, its noisy evolution and the photon-subtracted
/// states built from them.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianSumWigner {
    terms: Vec<GaussianTerm>,
}

impl GaussianSumWigner {
    pub fn new(terms: Vec<GaussianTerm>) -> Result<Self> {
        for (k, t) in terms.iter().enumerate() {
            if !t.is_integrable()
                || !t.weight.is_finite()
                || !t.p.is_finite()
                || !t.q.is_finite()
                || !t.s.is_finite()
            {
                return Err(Error::NotIntegrable { term: k });
            }
        }
        Ok(Self { terms })
    }

    pub fn terms(&self) -> &[GaussianTerm] {
        &self.terms
    }

    /// The single term of a one-term sum, if that is what this is.
    pub fn single_term(&self) -> Option<&GaussianTerm> {
        match self.terms.as_slice() {
            [t] => Some(t),
            _ => None,
        }
    }

    /// Analytic integral over the whole phase space.
    pub fn integral(&self) -> f64 {
        self.terms.iter().map(GaussianTerm::integral).sum()
    }

    pub fn value(&self, alpha: Complex64, beta: Complex64) -> f64 {
        self.value_xy(alpha.re, alpha.im, beta.re, beta.im)
    }

    pub fn value_xy(&self, x1: f64, y1: f64, x2: f64, y2: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| t.value_xy(x1, y1, x2, y2))
            .sum()
    }
}

/// Compact description of a single-Gaussian state in twin-beam form:
/// the kernel coefficients `(a_tilde, b_tilde)` together with
/// `sqrt(det sigma)`.
///
/// This is the triple the photon-subtraction map consumes, so feeding it the
/// noisy evolved state instead of the bare twin-beam is literally a swap of
/// inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwbWignerForm {
    pub a_tilde: f64,
    pub b_tilde: f64,
    pub sqrt_det: f64,
}

impl TwbWignerForm {
    pub fn from_twb(params: &TwbParams) -> Self {
        // For the bare twin-beam sqrt(det sigma) = 1/16, so the tilde
        // coefficients coincide with cosh(2r), sinh(2r).
        Self {
            a_tilde: params.cosh_2r(),
            b_tilde: params.sinh_2r(),
            sqrt_det: 1.0 / 16.0,
        }
    }

    /// Extract the form from a covariance matrix with equal modes.
    pub fn from_cov(sigma: &TwoModeCovariance) -> Result<Self> {
        let blocks = sigma.blocks()?;
        if (blocks.a1 - blocks.a2).abs() > STRUCT_TOL * blocks.a1.abs().max(1.0) {
            return Err(Error::NotTwbForm {
                reason: "unequal diagonal blocks",
            });
        }
        let sqrt_det = sigma.sqrt_determinant();
        Ok(Self {
            a_tilde: blocks.a1 / (16.0 * sqrt_det),
            b_tilde: blocks.b / (16.0 * sqrt_det),
            sqrt_det,
        })
    }

    /// Extract the form from a normalized single-Gaussian Wigner function.
    pub fn from_wigner(state: &GaussianSumWigner) -> Result<Self> {
        let term = state.single_term().ok_or(Error::NotTwbForm {
            reason: "more than one Gaussian term",
        })?;
        if (term.p - term.q).abs() > STRUCT_TOL * term.p.abs().max(1.0) {
            return Err(Error::NotTwbForm {
                reason: "unequal mode coefficients (p != q)",
            });
        }
        // weight = 1 / (4 pi^2 sqrt(det)) for a normalized state.
        let sqrt_det = 1.0 / (4.0 * std::f64::consts::PI.powi(2) * term.weight);
        if !(sqrt_det.is_finite() && sqrt_det > 0.0) {
            return Err(Error::NotTwbForm {
                reason: "non-positive normalization weight",
            });
        }
        Ok(Self {
            a_tilde: term.p / 2.0,
            b_tilde: term.s / 2.0,
            sqrt_det,
        })
    }
}

/// Effective squeezed-thermal decomposition of an evolved twin-beam:
/// two thermal states with mean photon numbers `m1 >= m2` entangled by a
/// two-mode squeezer of modulus `xi_mod`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveDecomposition {
    pub m1: f64,
    pub m2: f64,
    pub xi_mod: f64,
    /// Phase of the squeeze parameter; fixed and unused by the
    /// reconstruction, which is phase-rigid for this state family.
    pub xi_arg: f64,
}

impl EffectiveDecomposition {
    /// Pure twin-beam of squeezing `r` (no thermal photons).
    pub fn pure_twb(params: &TwbParams) -> Self {
        Self {
            m1: 0.0,
            m2: 0.0,
            xi_mod: params.r(),
            xi_arg: std::f64::consts::FRAC_PI_2,
        }
    }

    /// Physical states have both mean photon numbers non-negative.
    pub fn is_physical(&self) -> bool {
        self.m2 >= -1e-12 && self.m1 >= self.m2
    }

    /// Covariance matrix of the squeezed-thermal state this describes.
    pub fn reconstruct_cov(&self) -> TwoModeCovariance {
        let u = 1.0 + 2.0 * self.m1;
        let v = 1.0 + 2.0 * self.m2;
        let c2 = self.xi_mod.cosh().powi(2);
        let s2 = self.xi_mod.sinh().powi(2);
        let cs = self.xi_mod.cosh() * self.xi_mod.sinh();
        TwoModeCovariance::from_blocks(CovBlocks {
            a1: u * c2 + v * s2,
            a2: u * s2 + v * c2,
            b: cs * (u + v),
        })
    }
}

/// Covariance matrix of the twin-beam state with squeezing `r`:
/// diagonal blocks `cosh(2r)/4 * I`, off-diagonal `sinh(2r)/4 * diag(1,-1)`.
pub fn make_twb_cov(params: &TwbParams) -> TwoModeCovariance {
    TwoModeCovariance::from_blocks(CovBlocks {
        a1: params.cosh_2r(),
        a2: params.cosh_2r(),
        b: params.sinh_2r(),
    })
}

/// Closed-form covariance evolution through the lossy thermal channel:
/// `sigma_t = G^(1/2) sigma_0 G^(1/2) + (1 - G) sigma_inf` with
/// `G = diag(e^(-gt1), e^(-gt1), e^(-gt2), e^(-gt2))`.
pub fn evolve_cov(sigma0: &TwoModeCovariance, ch: &ChannelParams) -> TwoModeCovariance {
    let g1 = (-ch.gt1).exp();
    let g2 = (-ch.gt2).exp();
    let g_sqrt = Matrix4::from_diagonal(&nalgebra::Vector4::new(
        g1.sqrt(),
        g1.sqrt(),
        g2.sqrt(),
        g2.sqrt(),
    ));
    let one_minus_g = Matrix4::from_diagonal(&nalgebra::Vector4::new(
        1.0 - g1,
        1.0 - g1,
        1.0 - g2,
        1.0 - g2,
    ));
    let m = g_sqrt * sigma0.matrix() * g_sqrt + one_minus_g * ch.sigma_infinity().matrix();
    TwoModeCovariance { m }
}

/// Wigner function of a Gaussian state with the twin-beam block structure,
/// as a one-term Gaussian sum.
pub fn wigner_of_cov(sigma: &TwoModeCovariance) -> Result<GaussianSumWigner> {
    let blocks = sigma.blocks()?;
    let CovBlocks { a1, a2, b } = blocks;
    let det_x = a1 * a2 - b * b;
    if a1 <= 0.0 || a2 <= 0.0 || det_x <= 0.0 {
        return Err(Error::NotPositiveDefinite);
    }
    let sqrt_det = det_x / 16.0;
    let weight = 1.0 / (4.0 * std::f64::consts::PI.powi(2) * sqrt_det);
    GaussianSumWigner::new(vec![GaussianTerm {
        weight,
        p: 2.0 * a2 / det_x,
        q: 2.0 * a1 / det_x,
        s: 2.0 * b / det_x,
    }])
}

/// Effective squeezed-thermal decomposition of a twin-beam-form covariance.
///
/// With `a_plus = a1 + a2`, `a_minus = a1 - a2` the thermal occupancies are
/// `m_{1,2} = [sqrt(a_plus^2 - 4 b^2) -+ (2 -+ a_minus)] / 4` and the squeeze
/// modulus satisfies `sinh^2(xi) = a_plus / (2 sqrt(a_plus^2 - 4 b^2)) - 1/2`.
pub fn effective_decomposition(sigma_t: &TwoModeCovariance) -> Result<EffectiveDecomposition> {
    let CovBlocks { a1, a2, b } = sigma_t.blocks()?;
    let a_plus = a1 + a2;
    let a_minus = a1 - a2;
    let disc = a_plus * a_plus - 4.0 * b * b;
    if disc < 0.0 {
        return Err(Error::NonPhysical(format!(
            "negative discriminant a_plus^2 - 4 b^2 = {disc}"
        )));
    }
    let root = disc.sqrt();
    let m1 = (root - (2.0 - a_minus)) / 4.0;
    let m2 = (root - (2.0 + a_minus)) / 4.0;
    if m2 < -1e-12 {
        return Err(Error::NonPhysical(format!(
            "thermal occupancy m2 = {m2} is negative"
        )));
    }
    let sinh_sq = (a_plus / (2.0 * root) - 0.5).max(0.0);
    Ok(EffectiveDecomposition {
        m1,
        m2: m2.max(0.0),
        xi_mod: sinh_sq.sqrt().asinh(),
        xi_arg: std::f64::consts::FRAC_PI_2,
    })
}
