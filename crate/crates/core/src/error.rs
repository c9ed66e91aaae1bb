use thiserror::Error;

/// Errors raised by prior construction, channel evaluation and the bound
/// routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ZzbError {
    #[error("invalid prior: {0}")]
    InvalidPrior(String),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid hypothesis problem: {0}")]
    InvalidProblem(String),

    #[error("point lies outside the support of every shifted law")]
    OutsideSupport,

    #[error("invalid quadrature spec: {0}")]
    InvalidQuadrature(String),

    #[error("quadrature window too small: truncated mass {truncated:.3e} exceeds tolerance {tol:.3e}")]
    WindowTooSmall { truncated: f64, tol: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("observation y = {0} is outside the plausible range (posterior mass underflows)")]
    OutOfRange(f64),

    #[error("misuse: {0}")]
    Misuse(String),

    #[error("spec parse error at {location}: {message}")]
    Spec { location: String, message: String },
}

pub type Result<T> = std::result::Result<T, ZzbError>;
