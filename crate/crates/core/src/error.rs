use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension {0} outside supported range 1..=4")]
    UnsupportedDimension(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("lattice enumeration would visit {count} points, above the cap of {cap}")]
    LatticeCapExceeded { count: u128, cap: usize },

    #[error("grid of {grid} points per axis aliases degree {degree}; need at least {required}")]
    Aliasing {
        grid: usize,
        degree: usize,
        required: usize,
    },

    #[error("zero polynomial or function has no finite ratio")]
    ZeroFunction,

    #[error("empty spectrum")]
    EmptySpectrum,

    #[error("tail not integrable: decay order {order} at exponent {p} in dimension {dim}")]
    NotIntegrable { order: f64, p: f64, dim: usize },

    #[error("quadrature budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("function is unbounded or lacks a sup-norm bound")]
    Unbounded,

    #[error("truncation failure: out-of-spectrum energy {energy:e} above tolerance {tolerance:e}")]
    Truncation { energy: f64, tolerance: f64 },

    #[error("decay check failed: |f| = {observed:e} exceeds {allowed:e} at radius {radius}")]
    DecayViolation {
        observed: f64,
        allowed: f64,
        radius: f64,
    },

    #[error("optimizer failed: {0}")]
    Optimizer(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
