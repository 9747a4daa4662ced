//! Pseudospectral laboratory for two-dimensional abcd Boussinesq systems.
//!
//! The crate provides:
//! - [`spectral`]: Fourier calculus on a periodic torus (transforms,
//!   multipliers, Riesz transforms, fractional derivatives, norms);
//! - [`model`]: the abcd parameter space, dispersion relation and the
//!   KdV-KdV Hamiltonian;
//! - [`diag`]: the exact diagonalization of the KdV-KdV system and its
//!   nonlinearities;
//! - [`evolve`]: exact linear propagators and integrating-factor RK4
//!   time stepping for the 2D and 1D systems;
//! - [`estimates`]: numerical measurement of decay, Strichartz, local
//!   smoothing, maximal-function and oscillatory-integral bounds;
//! - [`harness`]: experiment configs, file formats and the CLI driver.

pub mod diag;
pub mod error;
pub mod estimates;
pub mod evolve;
pub mod harness;
pub mod model;
pub mod spectral;

pub use error::{Error, Result};

/// Version string embedded in all output files.
pub fn version_string() -> String {
    format!("boussinesq {}", env!("CARGO_PKG_VERSION"))
}
