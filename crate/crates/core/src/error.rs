use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("precision exceeded: p-adic order {needed} above cap {cap}")]
    PrecisionExceeded { needed: u64, cap: u64 },
    #[error("condition violated: {0}")]
    Condition(String),
    #[error("center is not permissible: {0}")]
    NotPermissible(String),
    #[error("empty polyhedron")]
    EmptyPolyhedron,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
