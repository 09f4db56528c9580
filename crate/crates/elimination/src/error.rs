use thiserror::Error;
use vardir_poly::PolyError;
use vardir_variety::VarietyError;

#[derive(Debug, Error)]
pub enum ElimError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Variety(#[from] VarietyError),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("Buchberger budget of {budget} pair reductions exhausted")]
    Budget { budget: usize },
    #[error("no shear on the grid produces a pure x_n^d term")]
    NoShear,
    #[error("projection audit {audit} is not below {bound}")]
    AuditFailed { audit: f64, bound: f64 },
}
