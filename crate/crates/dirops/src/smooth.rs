use vardir_geonet::{dot, DirectionSet};

use crate::error::{DirOpError, Result};
use crate::grid::{multiplier_table, AliasRule, GridFunction, GridShape};
use crate::psi::PsiProfile;
use crate::rough::max_over;

/// `ψ((ξ·v)/s)` on the spectrum layout of `shape`.
pub fn smooth_table(shape: &GridShape, v: &[f64], s: f64, psi: &PsiProfile) -> Result<Vec<f64>> {
    if v.len() != shape.dim() {
        return Err(DirOpError::InvalidArgument(format!("direction of length {} on a {}-dimensional grid", v.len(), shape.dim())));
    }
    if !(s > 0.0) || !s.is_finite() {
        return Err(DirOpError::InvalidArgument(format!("scale must be positive, got {s}")));
    }
    Ok(multiplier_table(shape, AliasRule::Mean, |xi| psi.eval(dot(xi, v) / s)))
}

/// `A_{v,s} f`: the spectrum of `f` multiplied by `ψ((ξ·v)/s)`.
pub fn smooth_multiplier(f: &GridFunction, v: &[f64], s: f64, psi: &PsiProfile) -> Result<GridFunction> {
    f.apply_multiplier(&smooth_table(f.shape(), v, s, psi)?)
}

fn moduli(g: &GridFunction) -> Vec<f64> {
    g.abs().real_values().expect("abs is real").to_vec()
}

/// `A_{V,s} f = sup_{v∈V} |A_{v,s} f|` with the maximizing direction index.
pub fn max_smooth_with_argmax(f: &GridFunction, v: &DirectionSet, s: f64, psi: &PsiProfile) -> Result<(GridFunction, Vec<u32>)> {
    if v.is_empty() {
        return Err(DirOpError::InvalidArgument("direction set is empty".into()));
    }
    f.spectrum();
    let (m, arg) = max_over(v.len(), |k| Ok(moduli(&smooth_multiplier(f, &v.points()[k], s, psi)?)))?;
    Ok((GridFunction::from_real(f.shape().clone(), m)?, arg))
}

pub fn max_smooth(f: &GridFunction, v: &DirectionSet, s: f64, psi: &PsiProfile) -> Result<GridFunction> {
    Ok(max_smooth_with_argmax(f, v, s, psi)?.0)
}
