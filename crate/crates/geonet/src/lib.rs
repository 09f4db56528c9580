//! Point sets on spheres and varieties: δ-nets, frequency bands `R_{ξ,s}`,
//! annuli `A_n(R)`, and the asymmetric distance `dist(U, V)`.

mod band;
mod direction;
mod distance;
mod error;
mod net;
pub mod sampling;

pub use band::{band_members, Annulus, Band};
pub use direction::DirectionSet;
pub use distance::{asym_dist, dist, dot, nearest, norm};
pub use error::GeoError;
pub use net::{build_net, Manifold, Net};
