use thiserror::Error;
use vardir_geonet::GeoError;
use vardir_poly::PolyError;
use vardir_variety::VarietyError;

#[derive(Debug, Error)]
pub enum PartitionError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Geo(#[from] GeoError),
    #[error(transparent)]
    Variety(#[from] VarietyError),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("no simultaneous bisection of {sets} sets in R^{dim} within the search budget")]
    BisectionBudget { sets: usize, dim: usize },
    #[error("patch {patch} has Lipschitz estimate {lipschitz} after {levels} refinement levels")]
    Lipschitz { patch: usize, lipschitz: f64, levels: usize },
    #[error("no perturbation ε certified the wall {what}")]
    Wall { what: String },
}
