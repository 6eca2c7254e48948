use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum CoepError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    /// The matrix failed the invertibility test; `margin` is its smallest singular value.
    #[error("matrix is singular (smallest singular value {margin:e})")]
    Singular { margin: f64 },

    /// A stated precondition on a pair of matrices does not hold numerically.
    #[error("contract violated: {what} (residual {residual:e})")]
    Contract { what: String, residual: f64 },

    #[error("precondition not met: {0}")]
    Precondition(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("not Moore-Penrose invertible: {0}")]
    NotMpInvertible(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = CoepError> = std::result::Result<T, E>;
