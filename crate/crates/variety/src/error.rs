use thiserror::Error;
use vardir_poly::PolyError;

#[derive(Debug, Error)]
pub enum VarietyError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("not a transverse complete intersection; rank test fails at {witness:?}")]
    NotTci { witness: Vec<f64> },
    #[error("could not find any point on the variety: {0}")]
    Indeterminate(String),
    #[error("tracing stalled near {point:?}: {reason}")]
    TraceStall { point: Vec<f64>, reason: String },
    #[error("approximation audit {best} did not reach epsilon {epsilon}")]
    AuditFailed { best: f64, epsilon: f64 },
    #[error("variety file, line {line}: {message}")]
    Format { line: usize, message: String },
}
