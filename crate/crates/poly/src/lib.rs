//! Sparse multivariate polynomials over exact rationals or `f64`.
//!
//! Terms are stored in graded-lex order with the leading term first. The two
//! coefficient modes never mix implicitly: use [`Polynomial::to_f64`] or
//! [`Polynomial::to_rational`] to move between them.

mod coeff;
mod error;
mod jacobian;
mod monomial;
mod polynomial;
mod system;
mod text;
mod veronese;

pub use coeff::{ratio, rational_from_f64, Coeff, Rational};
pub use error::PolyError;
pub use jacobian::{jacobian_matrix, jacobian_rank, RankInfo, DEFAULT_RANK_TOL};
pub use monomial::{divides, grlex_cmp, lex_cmp, total_degree, monomials_of_degree, monomials_up_to, Monomial};
pub use polynomial::{evaluate_with_gradient, monomial_value, Polynomial, Term};
pub use system::PolySystem;
pub use text::{parse_polynomial, parse_system, write_polynomial, write_system};
pub use veronese::{veronese_dim, veronese_lift};

/// Exact-coefficient polynomial.
pub type RatPoly = Polynomial<Rational>;
/// Floating-coefficient polynomial.
pub type FloatPoly = Polynomial<f64>;
