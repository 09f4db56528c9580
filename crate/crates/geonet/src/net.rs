use std::collections::HashMap;

use rand::Rng;

use crate::direction::DirectionSet;
use crate::error::GeoError;
use crate::sampling::{fibonacci_point, random_rotation3, random_unit_vector, rng, rotate3};

/// Where net points are drawn from.
#[derive(Clone, Debug)]
pub enum Manifold {
    /// The unit sphere `S^{n-1} ⊂ R^n`.
    Sphere { n: usize },
    /// A candidate pool already sampled on a variety, scanned in the given order.
    Samples(Vec<Vec<f64>>),
}

/// δ-separated subset whose δ-balls cover the candidate pool.
#[derive(Clone, Debug)]
pub struct Net {
    pub base: DirectionSet,
    pub delta: f64,
    /// Typical spacing of the candidate pool; manifold points are covered within `delta + pool_spacing`.
    pub pool_spacing: f64,
}

impl Net {
    pub fn points(&self) -> &[Vec<f64>] {
        self.base.points()
    }

    pub fn len(&self) -> usize {
        self.base.len()
    }

    pub fn is_empty(&self) -> bool {
        self.base.is_empty()
    }
}

const MAX_POOL: usize = 1 << 23;

struct Pool {
    count: usize,
    spacing: f64,
    gen: Box<dyn Fn(usize) -> Vec<f64> + Sync>,
}

fn sphere_pool(n: usize, delta: f64, seed: u64) -> Result<Pool, GeoError> {
    let mut r = rng(seed);
    match n {
        0 | 1 => Err(GeoError::InvalidArgument("sphere dimension must be at least 2".into())),
        2 => {
            let count = ((std::f64::consts::TAU * 16.0 / delta).ceil() as usize).clamp(4096, MAX_POOL);
            let step = std::f64::consts::TAU / count as f64;
            let offset = r.gen::<f64>() * step;
            Ok(Pool {
                count,
                spacing: step,
                gen: Box::new(move |k| {
                    let t = offset + step * k as f64;
                    vec![t.cos(), t.sin()]
                }),
            })
        }
        3 => {
            let per = delta / 8.0;
            let count = ((4.0 * std::f64::consts::PI / (per * per)).ceil() as usize).clamp(1 << 16, MAX_POOL);
            let rot = random_rotation3(&mut r);
            Ok(Pool {
                count,
                spacing: (4.0 * std::f64::consts::PI / count as f64).sqrt(),
                gen: Box::new(move |k| rotate3(&rot, fibonacci_point(k, count)).to_vec()),
            })
        }
        _ => {
            let count = ((20.0 * (2.0 / delta).powi(n as i32 - 1)).ceil() as usize).clamp(1 << 12, 1 << 20);
            let pts: Vec<Vec<f64>> = (0..count).map(|_| random_unit_vector(&mut r, n)).collect();
            let spacing = (2.0 / (count as f64).powf(1.0 / (n as f64 - 1.0))).min(2.0);
            Ok(Pool { count, spacing, gen: Box::new(move |k| pts[k].clone()) })
        }
    }
}

fn cell_key(p: &[f64], h: f64) -> Vec<i64> {
    p.iter().map(|x| (x / h).floor() as i64).collect()
}

fn neighbour_keys(key: &[i64]) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::with_capacity(key.len())];
    for &k in key {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (-1..=1).map(move |d| {
                    let mut v = prefix.clone();
                    v.push(k + d);
                    v
                })
            })
            .collect();
    }
    out
}

/// Sequential greedy selection: scan the pool and keep every candidate whose
/// distance to all kept points is at least `delta`.
fn greedy(pool: &Pool, delta: f64) -> Vec<Vec<f64>> {
    let mut kept: Vec<Vec<f64>> = Vec::new();
    let mut grid: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    let d2 = delta * delta;
    for k in 0..pool.count {
        let p = (pool.gen)(k);
        let key = cell_key(&p, delta);
        let clash = neighbour_keys(&key).iter().any(|nk| {
            grid.get(nk).map_or(false, |ids| {
                ids.iter().any(|&i| kept[i].iter().zip(&p).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() < d2)
            })
        });
        if !clash {
            grid.entry(key).or_default().push(kept.len());
            kept.push(p);
        }
    }
    kept
}

/// Greedy δ-net on a sphere or sampled variety, deterministic in `seed`.
///
/// Pairwise distances are at least `delta`; every pool candidate lies within
/// `delta` of a net point. When `delta` exceeds the diameter the net has one point.
pub fn build_net(manifold: &Manifold, delta: f64, seed: u64) -> Result<Net, GeoError> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(GeoError::InvalidArgument(format!("net separation must be positive, got {delta}")));
    }
    match manifold {
        Manifold::Sphere { n } => {
            let pool = sphere_pool(*n, delta, seed)?;
            let pts = if delta > 2.0 { vec![(pool.gen)(0)] } else { greedy(&pool, delta) };
            let base = DirectionSet::new(*n, normalize_all(pts), true)?;
            Ok(Net { base, delta, pool_spacing: pool.spacing })
        }
        Manifold::Samples(samples) => {
            let first = samples.first().ok_or(GeoError::EmptySet("samples"))?;
            let n = first.len();
            let owned = samples.clone();
            let pool = Pool { count: owned.len(), spacing: 0.0, gen: Box::new(move |k| owned[k].clone()) };
            let pts = greedy(&pool, delta);
            let base = DirectionSet::new(n, pts, false)?;
            Ok(Net { base, delta, pool_spacing: pool.spacing })
        }
    }
}

fn normalize_all(pts: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    pts.into_iter()
        .map(|p| {
            let r = crate::norm(&p);
            p.into_iter().map(|x| x / r).collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::dist;

    #[test]
    fn huge_delta_gives_single_point() {
        let net = build_net(&Manifold::Sphere { n: 2 }, 3.0, 1).unwrap();
        assert_eq!(net.len(), 1);
    }

    #[test]
    fn circle_count_in_range() {
        let net = build_net(&Manifold::Sphere { n: 2 }, 0.1, 7).unwrap();
        assert!((55..=130).contains(&net.len()), "got {}", net.len());
    }

    #[test]
    fn separation_holds_on_s2() {
        let net = build_net(&Manifold::Sphere { n: 3 }, 0.3, 2).unwrap();
        let p = net.points();
        for i in 0..p.len() {
            for j in 0..i {
                assert!(dist(&p[i], &p[j]) >= 0.3);
            }
        }
    }

    #[test]
    fn sample_pool_net() {
        let samples: Vec<Vec<f64>> = (0..100).map(|k| vec![k as f64 * 0.01, 0.0]).collect();
        let net = build_net(&Manifold::Samples(samples), 0.1, 0).unwrap();
        assert_eq!(net.len(), 10);
        assert!(build_net(&Manifold::Samples(vec![]), 0.1, 0).is_err());
        assert!(build_net(&Manifold::Sphere { n: 3 }, 0.0, 0).is_err());
    }
}
