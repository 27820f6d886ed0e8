use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("rule would contain {points} points, exceeding the {limit} point budget")]
    MemoryBudget { points: u128, limit: u64 },
    #[error("non-finite value encountered in {0}")]
    NonFinite(String),
    #[error("matrix is singular: {0}")]
    Singular(String),
    #[error("singular value decomposition did not converge")]
    SvdFailed,
    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
