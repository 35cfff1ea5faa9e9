use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("size error: {0}")]
    Size(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("resolution error: {0}")]
    Resolution(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("evaluation error at {point}: {message}")]
    Evaluation { point: String, message: String },
    #[error("format error: {0}")]
    Format(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
