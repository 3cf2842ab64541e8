use thiserror::Error;

/// Errors raised by the library. Mathematical totality is the norm; these
/// signal malformed input or a broken internal invariant.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("ambient group mismatch: {0}")]
    AmbientMismatch(String),
    #[error("ill-defined homomorphism: {0}")]
    IllDefined(String),
    #[error("sequence is not exact at {node}: {detail}")]
    NotExact { node: String, detail: String },
    #[error("invalid tower: {0}")]
    InvalidTower(String),
    #[error("invalid expression: {0}")]
    InvalidExpr(String),
    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("input too large: {0}")]
    TooLarge(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
