use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Argument outside the mathematical domain of a function.
    #[error("domain error: {0}")]
    Domain(String),

    /// Model parameters violating a structural constraint (β > κ/2, bad frame, weights...).
    #[error("constraint violation: {0}")]
    Constraint(String),

    /// A table or band-limit is too small for the requested operation.
    #[error("band-limit mismatch: {0}")]
    BandLimit(String),

    #[error("index out of range: {0}")]
    Index(String),

    /// Malformed external input (JSON, CSV).
    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
