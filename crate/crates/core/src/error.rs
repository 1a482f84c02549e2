use thiserror::Error;

/// Errors produced by the estimation library.
#[derive(Debug, Error)]
pub enum Error {
    /// Input data violates a precondition (shape, finiteness, coverage).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A configuration value is outside its admissible range.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// A numerical operation failed (ill-conditioned system, failed factorization).
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: String, actual: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid_input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn invalid_config(msg: impl Into<String>) -> Self {
        Error::InvalidConfig(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}
