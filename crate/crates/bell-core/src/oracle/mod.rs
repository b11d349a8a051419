//! Independent verification engines: adaptive phase-space quadrature, a
//! Fock-truncation expectation calculator, and a beam-splitter/POVM
//! construction of the photon-subtracted state. No closed form in this crate
//! is validated only against itself.
//!
//! Distributional pseudospin kernels are never integrated numerically; the
//! oracles validate their consequences (point evaluations and parity sums)
//! instead.

pub mod beamsplitter;
pub mod fock;
pub mod quadrature;

pub use beamsplitter::{conditioned_on_double_click, ConditionedGaussianMixture};
pub use fock::{fock_expectation, FockOperator, FockSpec};
pub use quadrature::{integrate, marginal_density, Estimate, IntegrandWeight, QuadratureSpec};
