use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("label set mismatch: {0}")]
    DomainMismatch(String),
    #[error("invalid base map: {0}")]
    InvalidBase(String),
    #[error("invalid embedding: {0}")]
    InvalidEmbedding(String),
    #[error("complex is not adapted to the group: {0}")]
    NotAdapted(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("reduction error: {0}")]
    Reduction(String),
    #[error("blowup violation: {0}")]
    BlowupViolation(String),
    #[error("orientation error: {0}")]
    Orientation(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("construction error: {0}")]
    Construction(String),
    #[error("malformed input: {0}")]
    Parse(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
