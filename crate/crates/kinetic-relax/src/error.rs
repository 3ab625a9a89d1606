//! Crate-wide error type.

use thiserror::Error;

/// Errors reported by solvers, assemblers and the experiment runner.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed caller input: dimension mismatches, non-finite data,
    /// out-of-range parameters.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A configuration file failed validation; `field` is a dotted path into
    /// the offending entry.
    #[error("config validation failed at `{field}`: {message}")]
    Validation { field: String, message: String },

    /// A computation produced non-finite values or a quantity degenerated
    /// below the resolvable threshold.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A sequence violated the decay recurrence it was checked against.
    #[error("recurrence violated at index {index}: {detail}")]
    Recurrence { index: usize, detail: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Shorthand used by config validation.
    pub fn validation(field: &str, message: impl Into<String>) -> Self {
        Error::Validation {
            field: field.to_string(),
            message: message.into(),
        }
    }
}
