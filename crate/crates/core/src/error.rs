use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension n = {n}: {reason}")]
    InvalidDimension { n: usize, reason: &'static str },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("{what} violated (max residual {residual:e})")]
    Symmetry { what: &'static str, residual: f64 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("{name} = {value} is outside the admissible range {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: String,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
