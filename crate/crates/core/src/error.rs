use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("{what} exceeds the configured budget of {limit}")]
    BudgetExceeded { what: &'static str, limit: u128 },

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("the expanded scale set is empty")]
    EmptyScales,

    #[error("dyadic window is empty for C1={c1}, C2={c2}, d={d}, q={q}")]
    EmptyWindow { c1: f64, c2: f64, d: usize, q: f64 },

    #[error("function is identically zero")]
    ZeroFunction,

    #[error("function takes negative values; weak-type search needs f >= 0")]
    SignedInput,

    #[error("value overflows f64 (log2 magnitude {log2:.1})")]
    Overflow { log2: f64 },

    #[error("quadrature did not converge: error estimate {estimate:e} above {target:e}")]
    Quadrature { estimate: f64, target: f64 },

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
