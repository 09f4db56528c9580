use std::collections::BTreeMap;
use std::ops::{Add, Mul};

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use vardir_geonet::{norm, DirectionSet};

use crate::error::{DirOpError, Result};
use crate::grid::{GridFunction, GridShape, Samples};

/// Default number of Simpson nodes on `[-1, 1]`.
pub const SIMPSON_NODES: usize = 65;

/// Tolerance on the bounds of `|v| ∈ [1, 2)`.
const ANNULUS_SLACK: f64 = 1e-12;

/// One term of a stencil: `weight · f(x + offset)` with the offset in grid
/// steps along the padded axes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Tap {
    pub offset: [i64; 3],
    pub weight: f64,
}

/// Composite Simpson nodes and weights on `[-1, 1]` for the normalized average
/// `(1/2)∫_{-1}^{1}`; the weights sum to 1.
pub fn simpson_rule(nodes: usize) -> Result<Vec<(f64, f64)>> {
    if nodes < 3 || nodes % 2 == 0 {
        return Err(DirOpError::InvalidArgument(format!("Simpson needs an odd node count ≥ 3, got {nodes}")));
    }
    let m = nodes - 1;
    let h = 2.0 / m as f64;
    Ok((0..nodes)
        .map(|k| {
            let c = if k == 0 || k == m {
                1.0
            } else if k % 2 == 1 {
                4.0
            } else {
                2.0
            };
            (-1.0 + k as f64 * h, 0.5 * c * h / 3.0)
        })
        .collect())
}

pub(crate) fn check_direction(v: &[f64], dim: usize) -> Result<f64> {
    if v.len() != dim {
        return Err(DirOpError::InvalidArgument(format!("direction of length {} on a {dim}-dimensional grid", v.len())));
    }
    let len = norm(v);
    if len < 1.0 - ANNULUS_SLACK || len >= 2.0 {
        return Err(DirOpError::Precondition(format!("direction length {len} is outside [1, 2)")));
    }
    Ok(len)
}

fn check_scale(shape: &GridShape, len: f64, r: f64) -> Result<()> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(DirOpError::InvalidArgument(format!("scale must be positive, got {r}")));
    }
    if r * len > shape.min_length() / 4.0 {
        return Err(DirOpError::Precondition(format!(
            "scale r|v| = {} exceeds a quarter of the box length {}",
            r * len,
            shape.min_length()
        )));
    }
    Ok(())
}

/// Multilinear-interpolation taps of the Simpson rule for `t ↦ f(x - t·r·v)`.
fn segment_taps(shape: &GridShape, v: &[f64], r: f64, nodes: usize) -> Result<Vec<Tap>> {
    let rule = simpson_rule(nodes)?;
    let d = shape.dim();
    let pad = 3 - d;
    let mut merged: BTreeMap<[i64; 3], f64> = BTreeMap::new();
    for (t, w) in rule {
        let mut base = [0i64; 3];
        let mut frac = [0.0f64; 3];
        for k in 0..d {
            let u = -t * r * v[k] / shape.spacing(k);
            let f = u.floor();
            base[k + pad] = f as i64;
            frac[k + pad] = u - f;
        }
        for corner in 0..(1usize << d) {
            let mut off = base;
            let mut cw = w;
            for k in 0..d {
                let up = (corner >> k) & 1 == 1;
                cw *= if up { frac[k + pad] } else { 1.0 - frac[k + pad] };
                off[k + pad] += up as i64;
            }
            if cw != 0.0 {
                *merged.entry(off).or_insert(0.0) += cw;
            }
        }
    }
    Ok(merged.into_iter().map(|(offset, weight)| Tap { offset, weight }).collect())
}

/// `out(x) = Σ_taps w · src(x + offset)` with periodic wrap. Taps are summed in
/// the same order at every point, so the result commutes exactly with grid
/// translations.
pub(crate) fn apply_taps<T>(dims: [usize; 3], src: &[T], taps: &[Tap]) -> Vec<T>
where
    T: Copy + Default + Send + Sync + Add<Output = T> + Mul<f64, Output = T>,
{
    let [d0, d1, d2] = dims;
    let tables: Vec<[Vec<usize>; 3]> = taps
        .iter()
        .map(|tap| {
            let table = |axis: usize, n: usize| -> Vec<usize> {
                (0..n).map(|i| (i as i64 + tap.offset[axis]).rem_euclid(n as i64) as usize).collect()
            };
            [table(0, d0), table(1, d1), table(2, d2)]
        })
        .collect();
    let mut out = vec![T::default(); src.len()];
    out.par_chunks_mut(d1 * d2).enumerate().for_each(|(i0, slab)| {
        for (tap, t) in taps.iter().zip(&tables) {
            let j0 = t[0][i0] * d1 * d2;
            for i1 in 0..d1 {
                let j1 = j0 + t[1][i1] * d2;
                let row = &mut slab[i1 * d2..(i1 + 1) * d2];
                for (i2, o) in row.iter_mut().enumerate() {
                    *o = *o + src[j1 + t[2][i2]] * tap.weight;
                }
            }
        }
    });
    out
}

fn apply_to(f: &GridFunction, taps: &[Tap]) -> Result<GridFunction> {
    let dims = f.shape().dims3();
    match f.samples() {
        Samples::Real(v) => GridFunction::from_real(f.shape().clone(), apply_taps(dims, v, taps)),
        Samples::Complex(v) => GridFunction::from_complex(f.shape().clone(), apply_taps(dims, v, taps)),
    }
}

/// `(1/2)∫_{-1}^{1} f(x - t·r·v) dt` at every grid point, by composite Simpson
/// with [`SIMPSON_NODES`] nodes and multilinear interpolation.
pub fn rough_average(f: &GridFunction, v: &[f64], r: f64) -> Result<GridFunction> {
    rough_average_with(f, v, r, SIMPSON_NODES)
}

pub fn rough_average_with(f: &GridFunction, v: &[f64], r: f64, nodes: usize) -> Result<GridFunction> {
    let len = check_direction(v, f.dim())?;
    check_scale(f.shape(), len, r)?;
    apply_to(f, &segment_taps(f.shape(), v, r, nodes)?)
}

/// The same average at an arbitrary point, interpolating the samples.
pub fn rough_average_at(f: &GridFunction, v: &[f64], r: f64, x: &[f64]) -> Result<Complex64> {
    let len = check_direction(v, f.dim())?;
    check_scale(f.shape(), len, r)?;
    let mut acc = Complex64::new(0.0, 0.0);
    let mut y = vec![0.0; x.len()];
    for (t, w) in simpson_rule(SIMPSON_NODES)? {
        for k in 0..x.len() {
            y[k] = x[k] - t * r * v[k];
        }
        acc += f.interpolate(&y) * w;
    }
    Ok(acc)
}

fn check_set(v: &DirectionSet, dim: usize) -> Result<()> {
    if v.is_empty() {
        return Err(DirOpError::InvalidArgument("direction set is empty".into()));
    }
    if v.dim() != dim {
        return Err(DirOpError::InvalidArgument(format!("{}-dimensional directions on a {dim}-dimensional grid", v.dim())));
    }
    Ok(())
}

/// Pointwise maximum with the index of the first maximizer.
pub(crate) fn max_merge(a: (Vec<f64>, Vec<u32>), b: (Vec<f64>, Vec<u32>)) -> (Vec<f64>, Vec<u32>) {
    let (mut av, mut ai) = a;
    let (bv, bi) = b;
    if av.is_empty() {
        return (bv, bi);
    }
    if bv.is_empty() {
        return (av, ai);
    }
    for k in 0..av.len() {
        if bv[k] > av[k] || (bv[k] == av[k] && bi[k] < ai[k]) {
            av[k] = bv[k];
            ai[k] = bi[k];
        }
    }
    (av, ai)
}

/// Runs `op(k)` for every direction index and keeps the pointwise maximum.
pub(crate) fn max_over<F>(count: usize, op: F) -> Result<(Vec<f64>, Vec<u32>)>
where
    F: Fn(usize) -> Result<Vec<f64>> + Sync,
{
    (0..count)
        .into_par_iter()
        .map(|k| op(k).map(|vals| (vals.len(), k, vals)))
        .try_fold(
            || (Vec::new(), Vec::new()),
            |acc, item| {
                let (n, k, vals) = item?;
                Ok(max_merge(acc, (vals, vec![k as u32; n])))
            },
        )
        .try_reduce(|| (Vec::new(), Vec::new()), |a, b| Ok(max_merge(a, b)))
}

/// `M_{V,r} f = sup_{v∈V} ⟨|f|⟩_{v,r}` together with the maximizing direction
/// index at every point.
pub fn max_rough_with_argmax(f: &GridFunction, v: &DirectionSet, r: f64) -> Result<(GridFunction, Vec<u32>)> {
    check_set(v, f.dim())?;
    let a = f.abs();
    let vals = a.real_values().expect("abs is real");
    let dims = f.shape().dims3();
    let mut tap_sets = Vec::with_capacity(v.len());
    for p in v.points() {
        let len = check_direction(p, f.dim())?;
        check_scale(f.shape(), len, r)?;
        tap_sets.push(segment_taps(f.shape(), p, r, SIMPSON_NODES)?);
    }
    let (m, arg) = max_over(v.len(), |k| Ok(apply_taps(dims, vals, &tap_sets[k])))?;
    Ok((GridFunction::from_real(f.shape().clone(), m)?, arg))
}

pub fn max_rough(f: &GridFunction, v: &DirectionSet, r: f64) -> Result<GridFunction> {
    Ok(max_rough_with_argmax(f, v, r)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_weights_sum_to_one_and_integrate_cubics() {
        let rule = simpson_rule(9).unwrap();
        let s: f64 = rule.iter().map(|(_, w)| w).sum();
        assert!((s - 1.0).abs() < 1e-15);
        let cubic: f64 = rule.iter().map(|(t, w)| w * (t * t * t + t * t)).sum();
        assert!((cubic - 1.0 / 3.0).abs() < 1e-14);
        assert!(simpson_rule(4).is_err());
    }

    #[test]
    fn taps_are_a_probability_vector() {
        let s = GridShape::cube(3, 16, 8.0).unwrap();
        let taps = segment_taps(&s, &[0.6, 0.0, 0.8], 1.3, SIMPSON_NODES).unwrap();
        let total: f64 = taps.iter().map(|t| t.weight).sum();
        assert!((total - 1.0).abs() < 1e-14);
        assert!(taps.iter().all(|t| t.weight > 0.0 && t.offset[0].abs() <= 3));
    }
}
