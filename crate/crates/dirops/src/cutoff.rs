use vardir_geonet::{dot, norm};

use crate::error::{DirOpError, Result};
use crate::grid::{multiplier_table, AliasRule, GridFunction, GridShape};

/// `6t⁵ - 15t⁴ + 10t³`, a C² step from 0 to 1 on `[0, 1]`.
fn smootherstep(t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    t * t * t * (10.0 + t * (-15.0 + 6.0 * t))
}

/// Radial profile of `S_1`: 1 on `[1, 2)`, 0 outside `(1/2, 4)`, C² in between.
pub fn lp_profile(rho: f64) -> f64 {
    if rho <= 0.5 || rho >= 4.0 {
        0.0
    } else if rho < 1.0 {
        smootherstep(2.0 * (rho - 0.5))
    } else if rho <= 2.0 {
        1.0
    } else {
        smootherstep((4.0 - rho) / 2.0)
    }
}

pub fn lp_table(shape: &GridShape) -> Vec<f64> {
    multiplier_table(shape, AliasRule::Mean, |xi| lp_profile(norm(xi)))
}

/// `S_1 f`, the smooth Littlewood–Paley cutoff to `A_n(1)`.
pub fn annulus_cutoff(f: &GridFunction) -> Result<GridFunction> {
    f.apply_multiplier(&lp_table(f.shape()))
}

/// Frequency sets for rough restrictions `f_R`.
#[derive(Clone, Debug, PartialEq)]
pub enum FreqRegion {
    /// `A_n(R) = {R^{-1} ≤ |η| < 2R}`.
    Annulus { r: f64 },
    /// `R_{ξ,s} = {η ∈ A_n(1) : |ξ·η| < s|η|}`.
    Band { xi: Vec<f64>, s: f64 },
    /// `{η ∈ A_n(2) : |ξ·η| < s|η|}`, the band over the support of `S_1`.
    FatBand { xi: Vec<f64>, s: f64 },
    Union(Vec<FreqRegion>),
}

impl FreqRegion {
    pub fn contains(&self, eta: &[f64]) -> bool {
        let in_annulus = |r: f64| {
            let t = norm(eta);
            t >= 1.0 / r && t < 2.0 * r
        };
        match self {
            FreqRegion::Annulus { r } => in_annulus(*r),
            FreqRegion::Band { xi, s } => in_annulus(1.0) && dot(xi, eta).abs() < s * norm(eta),
            FreqRegion::FatBand { xi, s } => in_annulus(2.0) && dot(xi, eta).abs() < s * norm(eta),
            FreqRegion::Union(parts) => parts.iter().any(|p| p.contains(eta)),
        }
    }

    fn validate(&self, dim: usize) -> Result<()> {
        match self {
            FreqRegion::Annulus { r } if !(*r >= 1.0) => Err(DirOpError::InvalidArgument(format!("annulus needs R ≥ 1, got {r}"))),
            FreqRegion::Band { xi, s } | FreqRegion::FatBand { xi, s } => {
                if xi.len() != dim || norm(xi) == 0.0 {
                    Err(DirOpError::InvalidArgument("band normal must be a nonzero vector of the grid dimension".into()))
                } else if !(*s > 0.0) {
                    Err(DirOpError::InvalidArgument(format!("band width must be positive, got {s}")))
                } else {
                    Ok(())
                }
            }
            FreqRegion::Union(parts) => parts.iter().try_for_each(|p| p.validate(dim)),
            _ => Ok(()),
        }
    }

    /// Indicator on the spectrum layout; an aliased entry is kept only when
    /// every frequency it stands for lies in the region.
    pub fn mask(&self, shape: &GridShape) -> Result<Vec<f64>> {
        self.validate(shape.dim())?;
        Ok(multiplier_table(shape, AliasRule::Min, |xi| if self.contains(xi) { 1.0 } else { 0.0 }))
    }
}

/// `f_R`, the rough frequency restriction to `R`.
pub fn rough_restrict(f: &GridFunction, region: &FreqRegion) -> Result<GridFunction> {
    f.apply_multiplier(&region.mask(f.shape())?)
}

/// Band width factor `c = 2 + 2σ` for which `A_{v,s}∘S_1 f = A_{v,s}∘S_1 f_{R}`
/// with `R = {η ∈ A_n(2) : |v'·η| < cs|η|}`.
pub fn band_support_factor(sigma: f64) -> f64 {
    2.0 + 2.0 * sigma
}

/// Energy bookkeeping for `Σ_C ‖f_{R_C}‖² ≤ (max overlap)·‖f‖²`.
#[derive(Clone, Debug, PartialEq)]
pub struct OverlapAudit {
    /// `Σ_C ‖f_{R_C}‖²`.
    pub restricted_energy: f64,
    /// `max_η #{C : η ∈ R_C}` over the grid frequencies.
    pub max_overlap: usize,
    /// `‖f‖²`.
    pub energy: f64,
}

impl OverlapAudit {
    pub fn holds(&self) -> bool {
        self.restricted_energy <= self.max_overlap as f64 * self.energy * (1.0 + 1e-12)
    }
}

pub fn overlap_audit(f: &GridFunction, regions: &[FreqRegion]) -> Result<OverlapAudit> {
    let shape = f.shape();
    let mut counts = vec![0usize; shape.len()];
    let mut restricted_energy = 0.0;
    for r in regions {
        let mask = r.mask(shape)?;
        for (c, m) in counts.iter_mut().zip(&mask) {
            *c += (*m > 0.0) as usize;
        }
        restricted_energy += f.apply_multiplier(&mask)?.norm_l2().powi(2);
    }
    Ok(OverlapAudit { restricted_energy, max_overlap: counts.into_iter().max().unwrap_or(0), energy: f.norm_l2().powi(2) })
}
