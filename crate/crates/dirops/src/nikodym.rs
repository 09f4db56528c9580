use rayon::prelude::*;
use serde::Serialize;
use vardir_geonet::{dot, norm, DirectionSet};

use crate::error::{DirOpError, Result};
use crate::grid::{GridFunction, GridShape};
use crate::rough::{apply_taps, check_direction, max_over, Tap};

/// Tubes of length `length` and cross-section diameter `width` along each
/// direction, one centred at every grid point.
#[derive(Clone, Debug)]
pub struct TubeFamily {
    pub directions: DirectionSet,
    pub length: f64,
    pub width: f64,
}

impl TubeFamily {
    /// Unit-length tubes of width `delta`; directions must lie in `A_n(1)`.
    pub fn new(directions: DirectionSet, delta: f64) -> Result<Self> {
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(DirOpError::InvalidArgument(format!("tube width must be positive, got {delta}")));
        }
        if directions.is_empty() {
            return Err(DirOpError::InvalidArgument("tube family has no directions".into()));
        }
        for p in directions.points() {
            check_direction(p, directions.dim())?;
        }
        Ok(Self { directions, length: 1.0, width: delta })
    }

    pub fn radius(&self) -> f64 {
        self.width / 2.0
    }
}

/// Lattice stencil of one tube, split as a Minkowski sum of a digital segment
/// and a one-layer digital disk so that sums and maxima factor into two sweeps.
#[derive(Clone, Debug, Serialize)]
pub struct TubeStencil {
    pub line: Vec<[i64; 3]>,
    pub disk: Vec<[i64; 3]>,
}

impl TubeStencil {
    pub fn new(shape: &GridShape, v: &[f64], length: f64, radius: f64) -> Self {
        let d = shape.dim();
        let pad = 3 - d;
        let len = norm(v);
        let u: Vec<f64> = v.iter().map(|x| x / len).collect();
        let h: Vec<f64> = (0..d).map(|k| shape.spacing(k)).collect();
        let step = (0..d).filter(|&k| u[k].abs() > 1e-15).map(|k| h[k] / u[k].abs()).fold(f64::INFINITY, f64::min);
        let reach = (0.5 * length / step + 1e-9).floor() as i64;
        let mut line = Vec::new();
        for j in -reach..=reach {
            let mut o = [0i64; 3];
            for k in 0..d {
                o[k + pad] = (j as f64 * step * u[k] / h[k]).round() as i64;
            }
            if line.last() != Some(&o) {
                line.push(o);
            }
        }
        let bound: Vec<i64> = (0..d).map(|k| (radius / h[k]).ceil() as i64 + 1).collect();
        let mut disk = Vec::new();
        let tol = 1e-9 * step;
        let mut p = vec![0i64; d];
        let total: i64 = bound.iter().map(|b| 2 * b + 1).product();
        for flat in 0..total {
            let mut rem = flat;
            for k in (0..d).rev() {
                let w = 2 * bound[k] + 1;
                p[k] = rem % w - bound[k];
                rem /= w;
            }
            let y: Vec<f64> = (0..d).map(|k| p[k] as f64 * h[k]).collect();
            let a = dot(&y, &u);
            let perp2 = dot(&y, &y) - a * a;
            if perp2 <= radius * radius * (1.0 + 1e-9) && a >= -0.5 * step - tol && a < 0.5 * step - tol {
                let mut o = [0i64; 3];
                for k in 0..d {
                    o[k + pad] = p[k];
                }
                disk.push(o);
            }
        }
        Self { line, disk }
    }

    /// Every offset of the tube, `line ⊕ disk`, with multiplicity.
    pub fn offsets(&self) -> Vec<[i64; 3]> {
        let mut out = Vec::with_capacity(self.line.len() * self.disk.len());
        for a in &self.line {
            for b in &self.disk {
                out.push([a[0] + b[0], a[1] + b[1], a[2] + b[2]]);
            }
        }
        out
    }
}

fn uniform(offsets: &[[i64; 3]]) -> Vec<Tap> {
    let w = 1.0 / offsets.len() as f64;
    offsets.iter().map(|&offset| Tap { offset, weight: w }).collect()
}

/// `out(x) = max_o src(x - o)`.
fn max_filter(dims: [usize; 3], src: &[f64], offsets: &[[i64; 3]]) -> Vec<f64> {
    let [d0, d1, d2] = dims;
    let wrap = |i: usize, o: i64, n: usize| (i as i64 - o).rem_euclid(n as i64) as usize;
    let mut out = vec![f64::NEG_INFINITY; src.len()];
    out.par_chunks_mut(d1 * d2).enumerate().for_each(|(i0, slab)| {
        for o in offsets {
            let j0 = wrap(i0, o[0], d0) * d1 * d2;
            for i1 in 0..d1 {
                let j1 = j0 + wrap(i1, o[1], d1) * d2;
                for i2 in 0..d2 {
                    let s = src[j1 + wrap(i2, o[2], d2)];
                    let c = &mut slab[i1 * d2 + i2];
                    if s > *c {
                        *c = s;
                    }
                }
            }
        }
    });
    out
}

fn check_family(f: &GridFunction, tubes: &TubeFamily) -> Result<()> {
    let shape = f.shape();
    if tubes.directions.dim() != shape.dim() {
        return Err(DirOpError::InvalidArgument("tube directions and grid differ in dimension".into()));
    }
    if tubes.width < 2.0 * shape.max_spacing() * (1.0 - 1e-12) {
        return Err(DirOpError::Precondition(format!(
            "tube width {} is under-resolved by grid spacing {}",
            tubes.width,
            shape.max_spacing()
        )));
    }
    if tubes.length > shape.min_length() / 2.0 {
        return Err(DirOpError::Precondition("tube length exceeds half the box".into()));
    }
    Ok(())
}

/// Average of `|f|` over the tube along direction `k` centred at every grid point.
pub fn tube_average(f: &GridFunction, tubes: &TubeFamily, k: usize) -> Result<GridFunction> {
    check_family(f, tubes)?;
    let dims = f.shape().dims3();
    let st = TubeStencil::new(f.shape(), &tubes.directions.points()[k], tubes.length, tubes.radius());
    let a = f.abs();
    let first = apply_taps(dims, a.real_values().expect("abs is real"), &uniform(&st.line));
    GridFunction::from_real(f.shape().clone(), apply_taps(dims, &first, &uniform(&st.disk)))
}

/// `M_{Z,δ} f(x)`: the largest tube average of `|f|` over the tubes of the
/// family that contain `x`, with the maximizing direction index.
pub fn nikodym_max_with_argmax(f: &GridFunction, tubes: &TubeFamily) -> Result<(GridFunction, Vec<u32>)> {
    check_family(f, tubes)?;
    let dims = f.shape().dims3();
    let a = f.abs();
    let vals = a.real_values().expect("abs is real");
    let (m, arg) = max_over(tubes.directions.len(), |k| {
        let st = TubeStencil::new(f.shape(), &tubes.directions.points()[k], tubes.length, tubes.radius());
        let avg = apply_taps(dims, &apply_taps(dims, vals, &uniform(&st.line)), &uniform(&st.disk));
        Ok(max_filter(dims, &max_filter(dims, &avg, &st.disk), &st.line))
    })?;
    Ok((GridFunction::from_real(f.shape().clone(), m)?, arg))
}

pub fn nikodym_max(f: &GridFunction, tubes: &TubeFamily) -> Result<GridFunction> {
    Ok(nikodym_max_with_argmax(f, tubes)?.0)
}
