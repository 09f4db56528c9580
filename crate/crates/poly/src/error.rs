use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyError {
    #[error("dimension mismatch: expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("polynomial system must contain at least one polynomial")]
    EmptySystem,
    #[error("polynomial {index} has {got} variables, system has {expected}")]
    InconsistentVars { index: usize, expected: usize, got: usize },
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("coefficient {0} is not a finite float")]
    NonFinite(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
