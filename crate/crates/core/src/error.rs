use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("polygamma order {0} not supported (expected 0..=3)")]
    Order(u8),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid body: {0}")]
    Body(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not invertible (condition number {condition:e})")]
    NonInvertible { condition: f64 },

    #[error("invalid profile: {0}")]
    Profile(String),

    #[error(
        "rejection envelope failure: acceptance rate below {rate:e} after {attempts} attempts"
    )]
    EnvelopeFailure { rate: f64, attempts: u64 },

    #[error("quadrature did not converge: achieved {achieved:e}, requested {requested:e}")]
    NonConvergence { achieved: f64, requested: f64 },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("CONJECTURE VIOLATION: phi = {phi:.17e} exceeds {bound:.17e} in dimension {dim}")]
    ConjectureViolation { dim: usize, phi: f64, bound: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
