use thiserror::Error;

#[derive(Debug, Error)]
pub enum PdError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("size guard: {what} has size {size}, limit is {limit}")]
    SizeGuard {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("malformed data: {0}")]
    Format(String),

    #[error("cannot parse `{input}`: {reason}")]
    Parse { input: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, PdError>;

pub(crate) fn invalid(msg: impl Into<String>) -> PdError {
    PdError::InvalidParameter(msg.into())
}
