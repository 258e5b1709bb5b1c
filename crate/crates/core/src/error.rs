use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("group descriptor mismatch: {left:?} vs {right:?}")]
    GroupMismatch { left: Vec<usize>, right: Vec<usize> },

    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid exponent: {0}")]
    InvalidExponent(String),

    #[error("unsupported exponents p={p}, q={q}: need 1/p + 1/q >= 1")]
    UnsupportedExponents { p: f64, q: f64 },

    #[error("{what}: size {size} exceeds ceiling {ceiling}")]
    CeilingExceeded {
        what: &'static str,
        size: usize,
        ceiling: usize,
    },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("config: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
