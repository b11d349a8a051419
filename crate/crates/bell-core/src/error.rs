use thiserror::Error;

/// Errors produced by state construction, the IPS map, the Bell tests and the
/// verification oracles.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter `{name}` must be non-negative, got {value}")]
    NegativeParameter { name: &'static str, value: f64 },

    #[error("parameter `{name}` must lie in (0, 1], got {value}")]
    OutOfUnitRange { name: &'static str, value: f64 },

    #[error("covariance matrix is not symmetric positive definite")]
    NotPositiveDefinite,

    #[error("covariance matrix lacks the twin-beam block form (a1*I, a2*I diagonal, b*diag(1,-1) off-diagonal)")]
    NotBlockForm,

    #[error("expected a single-Gaussian state in twin-beam form (equal modes), got {reason}")]
    NotTwbForm { reason: &'static str },

    #[error("non-physical covariance: {0}")]
    NonPhysical(String),

    #[error("Gaussian term {term} is not integrable (requires p > 0, q > 0 and p*q > s^2)")]
    NotIntegrable { term: usize },

    #[error("double-click probability {p11:.3e} is below {min:.0e}: conditioning on a no-click regime")]
    NoClickRegime { p11: f64, min: f64 },

    #[error("invalid configuration: field `{field}` {reason}")]
    InvalidConfig { field: &'static str, reason: String },

    #[error("quadrature did not converge within {regions} regions: estimate {estimate:.12e}, error bound {bound:.3e}")]
    QuadratureNotConverged {
        estimate: f64,
        bound: f64,
        regions: usize,
    },

    #[error("Fock expectation changed by {delta:.3e} between cutoffs {cutoff} and {}; increase the cutoff", cutoff + 10)]
    FockNotConverged { cutoff: usize, delta: f64 },

    #[error("no correlator is implemented for the requested pseudospin component pair")]
    UnsupportedKernel,
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for configuration/usage problems (CLI exit code 2); everything
    /// else is a domain error (exit code 3).
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::InvalidConfig { .. })
    }
}
