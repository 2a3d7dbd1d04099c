use thiserror::Error;

/// Errors produced by grid construction, operators and the time steppers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum DnlsError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid time grid: {0}")]
    InvalidTimeGrid(String),

    #[error("grid mismatch: field lives on {found}, expected {expected}")]
    GridMismatch { expected: String, found: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("negative quadratic form {value:e} exceeds roundoff allowance {allowance:e}")]
    NegativeQuadraticForm { value: f64, allowance: f64 },

    #[error("solver did not converge after {iterations} iterations (residual {residual:e}, tolerance {tol:e})")]
    NotConverged {
        iterations: usize,
        residual: f64,
        tol: f64,
    },

    #[error("numerical blow-up at step {step}: {reason}; reduce the time step")]
    Unstable { step: usize, reason: String },

    #[error("step {step} failed: {source}")]
    StepFailed {
        step: usize,
        #[source]
        source: Box<DnlsError>,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("division by zero: {0}")]
    DivisionByZero(String),
}

pub type Result<T> = std::result::Result<T, DnlsError>;
