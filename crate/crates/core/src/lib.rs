//! Spectral-gap analysis for adiabatic evolutions along interpolation paths
//! `H(t) = f(t)·H₀ + g(t)·H₁`, where one endpoint is a rank-one projector
//! complement and the other a diagonal cost.
//!
//! * [`objective`]: cost spectra and instance builders.
//! * [`hamiltonian`]: endpoint forms, schedules, matrix-free path operator.
//! * [`spectral`]: secular eigensolver, minimum gaps, crossing lines, bounds.
//! * [`equivalence`]: Hadamard-mirror and reparametrization identities.
//! * [`evolution`]: Schrödinger integration and adiabatic runtime budgets.

// `!(x > y)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod equivalence;
pub mod error;
pub mod evolution;
pub mod figures;
pub mod hamiltonian;
pub mod objective;
pub mod output;
pub mod spectral;
pub mod walsh;

pub use error::{Error, Result};
