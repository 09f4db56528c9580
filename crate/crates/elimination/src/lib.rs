//! Exact lex Gröbner bases over the rationals, first elimination ideals, and
//! the approximate projection of a transverse complete intersection onto a
//! coordinate hyperplane.

mod error;
mod groebner;
mod lex;
mod projection;

pub use error::ElimError;
pub use groebner::{buchberger, buchberger_with_budget, elimination_ideal, ideal_membership, GroebnerBasis, DEFAULT_BUDGET};
pub use projection::{
    approx_projection, approx_projection_with, has_pure_top_power, shear_polynomial, ApproxProjection, ProjectionOptions,
};
