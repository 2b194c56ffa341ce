use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("incompatible fields: {0}")]
    IncompatibleFields(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown target: {0}")]
    UnknownTarget(String),
    #[error("shard out of range: {0}")]
    ShardRange(String),
    #[error("certificate mismatch: {0}")]
    Certificate(String),
    #[error("synthesis failed: {0}")]
    Synthesis(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
