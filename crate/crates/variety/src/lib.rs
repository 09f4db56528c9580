//! Real algebraic varieties and transverse complete intersections (TCIs).
//!
//! Zero sets are explored numerically: Gauss–Newton projection produces
//! samples, SVD rank tests certify transversality, and predictor–corrector
//! continuation traces curves on `S^2`.

mod approx;
mod curve;
mod error;
mod newton;
mod region;
mod sample;
mod tci;
mod variety;

pub use approx::{singular_locus, tci_approximation, TciApproximation, ALPHA_GRID_MAX, ALPHA_GRID_MIN};
pub use curve::{
    curve_components, plane_crossing_points, plane_curve_crossings, sphere_curve, CrossingReport, CurveComponents,
    TraceOptions,
};
pub use error::VarietyError;
pub use newton::{newton_project, NewtonOptions};
pub use region::Region;
pub use sample::{sample_variety, SampleOutcome, SAMPLE_TOL};
pub use tci::{is_tci, is_tci_in, perturb_tci, project_or_nearest, perturbed_system, Perturbation, Tci, TciCheck, RANK_TOL};
pub use variety::{read_variety, write_variety, Variety};
