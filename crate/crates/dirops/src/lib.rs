//! Directional operators on periodic grids in `R^2` and `R^3`.
//!
//! Rough averages `⟨f⟩_{v,r}` and `M_{V,r}`, smooth multipliers `A_{v,s}` and
//! `A_{V,s}`, the Littlewood–Paley cutoff `S_1`, rough frequency restrictions
//! `f_R`, band projections `B_{v,I}`, and the Nikodym maximal function
//! `M_{Z,δ}`; plus lower-bound norm estimation and log–log growth fits.
//! Spectra use the convention `f(x) = Σ_ξ f̂(ξ) e^{ix·ξ}`.

mod band;
mod cutoff;
mod error;
mod fit;
mod grid;
mod nikodym;
mod opnorm;
pub mod pointwise;
mod psi;
mod rough;
mod smooth;

pub use band::{band_operator, Interval};
pub use cutoff::{annulus_cutoff, band_support_factor, lp_profile, lp_table, overlap_audit, rough_restrict, FreqRegion, OverlapAudit};
pub use error::{DirOpError, Result};
pub use fit::{growth_fit, GrowthFit};
pub use grid::{multiplier_table, AliasRule, GridFunction, GridShape, Samples};
pub use nikodym::{nikodym_max, nikodym_max_with_argmax, tube_average, TubeFamily, TubeStencil};
pub use opnorm::{opnorm_lower, random_band_limited, Modulation, NormEstimate, OperatorSpec, TestDescriptor, TestFamily};
pub use psi::{PsiProfile, PsiShape, DEFAULT_SIGMA};
pub use rough::{max_rough, max_rough_with_argmax, rough_average, rough_average_at, rough_average_with, simpson_rule, SIMPSON_NODES};
pub use smooth::{max_smooth, max_smooth_with_argmax, smooth_multiplier, smooth_table};
