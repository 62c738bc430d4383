use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed profile or dataset text.
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
    /// Mismatched voter/candidate dimensions between two values.
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    /// A scoring vector that is not non-increasing or is constant.
    #[error("invalid scoring rule: {0}")]
    InvalidRule(String),
    /// A documented precondition of an operation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// Locking an occupied cell, freeing a null cell, or breaking row
    /// uniqueness.
    #[error("illegal cell mutation: {0}")]
    IllegalMutation(String),
    /// An exhaustive procedure was asked to run beyond its hard size guard.
    #[error("instance exceeds guard: {0}")]
    GuardExceeded(String),
    /// Out-of-range culture parameters.
    #[error("invalid culture: {0}")]
    InvalidCulture(String),
    /// Statistically degenerate input (e.g. constant data for a rank
    /// correlation).
    #[error("degenerate input: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, Error>;
