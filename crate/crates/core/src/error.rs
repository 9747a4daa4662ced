//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: expected {expected:?}, got {got:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        got: (usize, usize),
    },

    #[error("grid mismatch between operands")]
    GridMismatch,

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("linearly ill-posed at |xi| = {xi}: radicand {radicand} < 0")]
    IllPosed { xi: f64, radicand: f64 },

    #[error("curl-free precondition violated: relative curl norm {0:.3e}")]
    CurlViolation(f64),

    #[error("vorticity mode w0 not negligible: relative norm {0:.3e}")]
    VorticityNotNegligible(f64),

    #[error("numerical blow-up at t = {t}")]
    BlowUp { t: f64 },

    #[error("quadrature failed to converge: {0}")]
    QuadratureFailure(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("snapshot format error: {0}")]
    SnapshotFormat(String),
}

pub type Result<T> = std::result::Result<T, Error>;
