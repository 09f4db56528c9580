use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExperimentError {
    /// The configuration does not match the schema or violates a precondition.
    #[error("config: {0}")]
    Schema(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, ExperimentError>;

pub(crate) fn schema<T>(message: impl Into<String>) -> Result<T> {
    Err(ExperimentError::Schema(message.into()))
}
