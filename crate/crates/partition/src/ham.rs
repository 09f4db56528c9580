use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};
use vardir_geonet::sampling::{random_unit_vector, rng};

use crate::error::PartitionError;

/// Relative tolerance under which a point counts as lying on a hyperplane.
pub const ON_PLANE_TOL: f64 = 1e-12;

/// The hyperplane `w·x = b`, stored with `|w| = 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hyperplane {
    pub w: Vec<f64>,
    pub b: f64,
}

impl Hyperplane {
    pub fn new(w: Vec<f64>, b: f64) -> Result<Self, PartitionError> {
        let r = w.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(r > 0.0) || !r.is_finite() || !b.is_finite() {
            return Err(PartitionError::InvalidArgument("hyperplane normal must be finite and nonzero".into()));
        }
        let flip = w.iter().find(|v| **v != 0.0).is_some_and(|v| *v < 0.0);
        let s = if flip { -1.0 / r } else { 1.0 / r };
        Ok(Self { w: w.into_iter().map(|v| v * s).collect(), b: b * s })
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.w.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() - self.b
    }

    /// `-1`, `0` or `1`; zero within [`ON_PLANE_TOL`] relative to the magnitudes involved.
    pub fn side(&self, x: &[f64]) -> i8 {
        let v = self.eval(x);
        let scale = 1.0 + self.b.abs() + x.iter().map(|t| t * t).sum::<f64>().sqrt();
        if v.abs() <= ON_PLANE_TOL * scale {
            0
        } else if v > 0.0 {
            1
        } else {
            -1
        }
    }

    /// `(strictly below, on, strictly above)`.
    pub fn side_counts(&self, set: &[Vec<f64>]) -> (usize, usize, usize) {
        let mut c = (0, 0, 0);
        for x in set {
            match self.side(x) {
                -1 => c.0 += 1,
                0 => c.1 += 1,
                _ => c.2 += 1,
            }
        }
        c
    }

    /// At most `ceil(|set| / 2)` points strictly on each side.
    pub fn bisects(&self, set: &[Vec<f64>]) -> bool {
        let (lo, _, hi) = self.side_counts(set);
        let half = set.len().div_ceil(2);
        lo <= half && hi <= half
    }
}

const RESTARTS: u64 = 64;
const ITERS: usize = 60;

/// Median data of one set along `w`: admissible offsets `[lo, hi]` and the anchor
/// point a bisecting hyperplane must contain.
fn median_data(set: &[Vec<f64>], w: &[f64]) -> (f64, f64, Vec<f64>) {
    let mut proj: Vec<(f64, usize)> =
        set.iter().enumerate().map(|(i, x)| (w.iter().zip(x).map(|(a, b)| a * b).sum(), i)).collect();
    proj.sort_by(|a, b| a.0.total_cmp(&b.0));
    let n = proj.len();
    if n % 2 == 1 {
        let (v, i) = proj[n / 2];
        (v, v, set[i].clone())
    } else {
        let (a, i) = proj[n / 2 - 1];
        let (b, j) = proj[n / 2];
        let mid = set[i].iter().zip(&set[j]).map(|(p, q)| 0.5 * (p + q)).collect();
        (a, b, mid)
    }
}

/// Finds one hyperplane bisecting every set simultaneously.
///
/// The search is a Newton-type iteration on the median functions: with the
/// current normal `w`, each set contributes its median point (or the midpoint of
/// its two middle points), and the next hyperplane is the nearest one through all
/// of those anchors. Every candidate is verified by exact side counting, and
/// seeded restarts cover cycling.
pub fn ham_sandwich_bisect(sets: &[Vec<Vec<f64>>], seed: u64) -> Result<Hyperplane, PartitionError> {
    let dim = sets.iter().flat_map(|s| s.first()).map(|x| x.len()).next().unwrap_or(1);
    if sets.iter().flatten().any(|x| x.len() != dim) {
        return Err(PartitionError::InvalidArgument("points of differing dimension".into()));
    }
    let active: Vec<&Vec<Vec<f64>>> = sets.iter().filter(|s| s.len() >= 2).collect();
    if active.len() > dim {
        return Err(PartitionError::InvalidArgument(format!(
            "{} sets cannot in general be bisected by a hyperplane in R^{dim}",
            active.len()
        )));
    }
    let try_plane = |w: &[f64], b: f64| Hyperplane::new(w.to_vec(), b).ok().filter(|h| sets.iter().all(|s| h.bisects(s)));
    if active.is_empty() {
        let mut w = vec![0.0; dim];
        w[0] = 1.0;
        return Hyperplane::new(w, 0.0);
    }
    for restart in 0..RESTARTS {
        let mut r = rng(seed);
        r.set_stream(restart);
        let mut w = random_unit_vector(&mut r, dim);
        for _ in 0..ITERS {
            let data: Vec<(f64, f64, Vec<f64>)> = active.iter().map(|s| median_data(s, &w)).collect();
            let lo = data.iter().map(|d| d.0).fold(f64::NEG_INFINITY, f64::max);
            let hi = data.iter().map(|d| d.1).fold(f64::INFINITY, f64::min);
            if lo <= hi {
                for b in [0.5 * (lo + hi), lo, hi] {
                    if let Some(h) = try_plane(&w, b) {
                        return Ok(h);
                    }
                }
            }
            let bbar = data.iter().map(|d| 0.5 * (d.0 + d.1)).sum::<f64>() / data.len() as f64;
            let k = data.len();
            let a = DMatrix::from_fn(k, dim + 1, |i, j| if j < dim { data[i].2[j] } else { -1.0 });
            let z = DVector::from_iterator(dim + 1, w.iter().copied().chain(std::iter::once(bbar)));
            let aat = &a * a.transpose();
            let Some(corr) = aat.svd(true, true).solve(&(&a * &z), 1e-13).ok() else { break };
            let z2 = &z - a.transpose() * corr;
            let wn: f64 = z2.rows(0, dim).norm();
            if !(wn > 1e-12) {
                break;
            }
            let mut next: Vec<f64> = z2.rows(0, dim).iter().map(|v| v / wn).collect();
            let b2 = z2[dim] / wn;
            if let Some(h) = try_plane(&next, b2) {
                return Ok(h);
            }
            let moved: f64 = next.iter().zip(&w).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
            if moved < 1e-12 {
                // stalled on a non-bisecting fixed point: kick the normal
                for v in next.iter_mut() {
                    *v += 1e-3 * r.gen_range(-1.0..1.0);
                }
            }
            w = next;
        }
    }
    Err(PartitionError::BisectionBudget { sets: active.len(), dim })
}
