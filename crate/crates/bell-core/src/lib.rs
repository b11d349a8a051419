//! Analytic toolkit for twin-beam (TWB) and inconclusive-photon-subtracted
//! (IPS) continuous-variable states: closed-form evolution through lossy
//! thermal channels and three Bell-nonlocality tests (displaced parity,
//! dichotomized homodyne, pseudospin), with independent verification oracles.

pub mod dp;
pub mod error;
pub mod gaussian;
pub mod hd;
pub mod ips;
pub mod oracle;
pub mod ps;
pub mod result;
pub mod sweep;

pub use dp::{bell_dp, parity_correlator, DpGeometry};
pub use error::{Error, Result};
pub use gaussian::{
    effective_decomposition, evolve_cov, make_twb_cov, wigner_of_cov, ChannelParams, CovBlocks,
    EffectiveDecomposition, GaussianSumWigner, GaussianTerm, TwbParams, TwbWignerForm,
    TwoModeCovariance,
};
pub use hd::{bell_hd, joint_quadrature_gaussians, sign_correlator, HdSettings};
pub use ips::{effective_transmissivity, ips_coefficients, ips_state, IpsCoefficients, IpsParams};
pub use ps::{bell_ps, correlator_generic, e_ips, e_twb, PsAngles, PseudospinKernel};
pub use result::{BellResult, BellTest};
pub use sweep::{
    eval_point, maximize_over_r, preset, sweep, Grid, Preset, PresetCurve, StateKind, SweepConfig,
    SweepRow, PRESET_IDS,
};
