//! Grid-free evaluation of `M_{V,r}` and `M_{Z,δ}` on ball indicators.
//!
//! Averages of `1_B` along segments and over tubes have closed forms, so these
//! routes reach scales (`r = 64` against a unit ball, `δ = 1/32` tubes) that a
//! periodic grid cannot resolve. Norms are integrated by seeded Monte Carlo.

use std::collections::HashMap;
use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use vardir_geonet::sampling::{gaussian, rng};
use vardir_geonet::{dot, norm, DirectionSet};

use crate::error::{DirOpError, Result};

/// Closed ball `|x - center| ≤ radius` in `R^2` or `R^3`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

fn ball_volume(dim: usize, r: f64) -> f64 {
    match dim {
        2 => PI * r * r,
        _ => 4.0 / 3.0 * PI * r * r * r,
    }
}

impl Ball {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        if center.len() != 2 && center.len() != 3 {
            return Err(DirOpError::InvalidArgument(format!("balls live in R^2 or R^3, got dimension {}", center.len())));
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(DirOpError::InvalidArgument(format!("radius must be positive, got {radius}")));
        }
        Ok(Self { center, radius })
    }

    pub fn centered(dim: usize, radius: f64) -> Result<Self> {
        Self::new(vec![0.0; dim], radius)
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn volume(&self) -> f64 {
        ball_volume(self.dim(), self.radius)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        let d2: f64 = x.iter().zip(&self.center).map(|(a, b)| (a - b) * (a - b)).sum();
        d2 <= self.radius * self.radius
    }

    /// `(1/2)∫_{-1}^{1} 1_B(x - t·r·v) dt`, from the roots of `|x - c - t r v|² = b²`.
    pub fn segment_average(&self, x: &[f64], v: &[f64], r: f64) -> f64 {
        let y: Vec<f64> = x.iter().zip(&self.center).map(|(a, b)| a - b).collect();
        let a2 = r * r * dot(v, v);
        let a1 = -2.0 * r * dot(&y, v);
        let a0 = dot(&y, &y) - self.radius * self.radius;
        let disc = a1 * a1 - 4.0 * a2 * a0;
        if disc <= 0.0 || a2 == 0.0 {
            return 0.0;
        }
        let sq = disc.sqrt();
        let lo = ((-a1 - sq) / (2.0 * a2)).max(-1.0);
        let hi = ((-a1 + sq) / (2.0 * a2)).min(1.0);
        (0.5 * (hi - lo)).max(0.0)
    }
}

/// Spatial hash of unit directions for cone queries around `±u`.
#[derive(Clone, Debug)]
pub struct DirectionIndex {
    dirs: Vec<Vec<f64>>,
    units: Vec<Vec<f64>>,
    cell: f64,
    cells: HashMap<Vec<i64>, Vec<u32>>,
}

impl DirectionIndex {
    pub fn new(v: &DirectionSet) -> Result<Self> {
        if v.is_empty() {
            return Err(DirOpError::InvalidArgument("direction set is empty".into()));
        }
        let d = v.dim();
        let units: Vec<Vec<f64>> = v
            .points()
            .iter()
            .map(|p| {
                let l = norm(p);
                p.iter().map(|x| x / l).collect()
            })
            .collect();
        let spacing = match d {
            2 => 2.0 * PI / units.len() as f64,
            _ => (4.0 * PI / units.len() as f64).sqrt(),
        };
        let cell = (2.0 * spacing).clamp(1e-3, 0.5);
        let mut cells: HashMap<Vec<i64>, Vec<u32>> = HashMap::new();
        for (i, u) in units.iter().enumerate() {
            cells.entry(key(u, cell)).or_default().push(i as u32);
        }
        Ok(Self { dirs: v.points().to_vec(), units, cell, cells })
    }

    pub fn len(&self) -> usize {
        self.dirs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dirs.is_empty()
    }

    pub fn direction(&self, i: usize) -> &[f64] {
        &self.dirs[i]
    }

    /// Indices of the directions making an angle below `alpha` with `u` or `-u`
    /// (`u` a unit vector). May include a few more; never misses one.
    pub fn near_axis(&self, u: &[f64], alpha: f64, out: &mut Vec<u32>) {
        out.clear();
        let chord = 2.0 * (0.5 * alpha.min(PI)).sin() + 1e-12;
        let d = u.len();
        let span = (chord / self.cell).ceil() as i64 + 1;
        let cost = (2 * span + 1).pow(d as u32) as usize;
        if alpha >= 0.5 * PI || 2 * cost >= self.len() {
            out.extend(0..self.len() as u32);
            return;
        }
        for sign in [1.0, -1.0] {
            let c: Vec<f64> = u.iter().map(|x| sign * x).collect();
            let lo: Vec<i64> = c.iter().map(|x| ((x - chord) / self.cell).floor() as i64).collect();
            let hi: Vec<i64> = c.iter().map(|x| ((x + chord) / self.cell).floor() as i64).collect();
            let mut k = lo.clone();
            loop {
                if let Some(ids) = self.cells.get(&k) {
                    for &i in ids {
                        let w = &self.units[i as usize];
                        let d2: f64 = w.iter().zip(&c).map(|(a, b)| (a - b) * (a - b)).sum();
                        if d2 <= chord * chord {
                            out.push(i);
                        }
                    }
                }
                let mut axis = 0;
                while axis < d {
                    k[axis] += 1;
                    if k[axis] <= hi[axis] {
                        break;
                    }
                    k[axis] = lo[axis];
                    axis += 1;
                }
                if axis == d {
                    break;
                }
            }
        }
    }
}

fn key(p: &[f64], h: f64) -> Vec<i64> {
    p.iter().map(|x| (x / h).floor() as i64).collect()
}

/// `M_{V,r} 1_B(x)`, trying only the directions whose lines can meet the ball.
pub fn maximal_ball_at(ball: &Ball, index: &DirectionIndex, r: f64, x: &[f64], scratch: &mut Vec<u32>) -> f64 {
    let y: Vec<f64> = x.iter().zip(&ball.center).map(|(a, b)| a - b).collect();
    let dist = norm(&y);
    let alpha = if dist <= ball.radius { PI } else { (ball.radius / dist).asin() + 1e-9 };
    let u: Vec<f64> = if dist > 0.0 { y.iter().map(|t| t / dist).collect() } else { y.clone() };
    index.near_axis(&u, alpha, scratch);
    scratch.iter().map(|&i| ball.segment_average(x, index.direction(i as usize), r)).fold(0.0, f64::max)
}

/// A Monte Carlo estimate of `‖T 1_B‖_2 / ‖1_B‖_2`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormSample {
    pub ratio: f64,
    /// One standard error of `ratio`.
    pub std_err: f64,
    pub samples: usize,
    /// Radius of the ball the samples were drawn from.
    pub support_radius: f64,
    pub seed: u64,
}

const CHUNK: usize = 4096;

/// `∫_{B(0,R)} F²` by uniform sampling, with its standard error. Chunk `j`
/// uses ChaCha stream `j`, and partial sums are combined in chunk order.
fn integrate_sq<F>(dim: usize, radius: f64, samples: usize, seed: u64, f: F) -> (f64, f64)
where
    F: Fn(&[f64], &mut Vec<u32>) -> f64 + Sync,
{
    let chunks = samples.div_ceil(CHUNK);
    let parts: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|j| {
            let mut g = rng(seed);
            g.set_stream(j as u64);
            let count = CHUNK.min(samples - j * CHUNK);
            let mut scratch = Vec::new();
            let (mut s1, mut s2) = (0.0, 0.0);
            for _ in 0..count {
                let dir: Vec<f64> = (0..dim).map(|_| gaussian(&mut g)).collect();
                let l = norm(&dir);
                let rad = radius * g.gen::<f64>().powf(1.0 / dim as f64);
                let x: Vec<f64> = dir.iter().map(|t| t / l * rad).collect();
                let v = f(&x, &mut scratch);
                s1 += v * v;
                s2 += v * v * v * v;
            }
            (s1, s2)
        })
        .collect();
    let (s1, s2) = parts.iter().fold((0.0, 0.0), |(a, b), (c, d)| (a + c, b + d));
    let n = samples as f64;
    let mean = s1 / n;
    let var = (s2 / n - mean * mean).max(0.0);
    let vol = ball_volume(dim, radius);
    (vol * mean, vol * (var / n).sqrt())
}

fn to_ratio(integral: f64, err: f64, f_norm_sq: f64, samples: usize, radius: f64, seed: u64) -> NormSample {
    let ratio = (integral / f_norm_sq).sqrt();
    let std_err = if integral > 0.0 { 0.5 * ratio * err / integral } else { 0.0 };
    NormSample { ratio, std_err, samples, support_radius: radius, seed }
}

/// `‖M_{V,r} 1_B‖_2 / ‖1_B‖_2` over `samples` uniform points of the support.
pub fn maximal_ball_ratio(ball: &Ball, v: &DirectionSet, r: f64, samples: usize, seed: u64) -> Result<NormSample> {
    if v.dim() != ball.dim() {
        return Err(DirOpError::InvalidArgument("ball and directions differ in dimension".into()));
    }
    if samples == 0 || !(r > 0.0) {
        return Err(DirOpError::InvalidArgument("need a positive scale and at least one sample".into()));
    }
    let index = DirectionIndex::new(v)?;
    let reach = v.points().iter().map(|p| norm(p)).fold(0.0, f64::max) * r;
    let radius = norm(&ball.center) + ball.radius + reach;
    let (i, e) = integrate_sq(ball.dim(), radius, samples, seed, |x, s| maximal_ball_at(ball, &index, r, x, s));
    Ok(to_ratio(i, e, ball.volume(), samples, radius, seed))
}

/// Uniform point of the spherical cap of half-angle `alpha` about the unit vector `u`.
fn cap_point<R: Rng>(g: &mut R, u: &[f64], alpha: f64) -> [f64; 3] {
    let c = 1.0 - g.gen::<f64>() * (1.0 - alpha.cos());
    let s = (1.0 - c * c).max(0.0).sqrt();
    let phi = 2.0 * PI * g.gen::<f64>();
    let helper = if u[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let d = dot(&helper, u);
    let mut e1 = [helper[0] - d * u[0], helper[1] - d * u[1], helper[2] - d * u[2]];
    let l = norm(&e1);
    e1.iter_mut().for_each(|t| *t /= l);
    let e2 = [u[1] * e1[2] - u[2] * e1[1], u[2] * e1[0] - u[0] * e1[2], u[0] * e1[1] - u[1] * e1[0]];
    let (a, b) = (s * phi.cos(), s * phi.sin());
    [c * u[0] + a * e1[0] + b * e2[0], c * u[1] + a * e1[1] + b * e2[1], c * u[2] + a * e1[2] + b * e2[2]]
}

/// `‖M_{V,r} 1_B‖_2 / ‖1_B‖_2` in `R^3`, sampling only where the output can be
/// nonzero.
///
/// A line through `x` meets `B` only when `x - c` lies within `asin(b/|x - c|)`
/// of `±v` for some `v ∈ V`. Radii are drawn uniformly on `[0, R]`, then a
/// direction uniformly from one of those cones picked at random, and every
/// sample carries the inverse of the resulting density. This suits direction
/// sets along curves, whose cones cover a vanishing part of the sphere.
pub fn maximal_ball_ratio_cones(ball: &Ball, v: &DirectionSet, r: f64, samples: usize, seed: u64) -> Result<NormSample> {
    if v.dim() != 3 || ball.dim() != 3 {
        return Err(DirOpError::InvalidArgument("the cone sampler is three-dimensional".into()));
    }
    if samples == 0 || !(r > 0.0) {
        return Err(DirOpError::InvalidArgument("need a positive scale and at least one sample".into()));
    }
    let index = DirectionIndex::new(v)?;
    let reach = v.points().iter().map(|p| norm(p)).fold(0.0, f64::max) * r;
    let radius = ball.radius + reach;
    let count = index.len();
    let chunks = samples.div_ceil(CHUNK);
    let parts: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|j| {
            let mut g = rng(seed);
            g.set_stream(j as u64);
            let mut scratch = Vec::new();
            let mut near = Vec::new();
            let (mut s1, mut s2) = (0.0, 0.0);
            for _ in 0..CHUNK.min(samples - j * CHUNK) {
                let t = radius * g.gen::<f64>();
                let alpha = if t <= ball.radius { PI } else { (ball.radius / t).asin() };
                let (w, density) = if alpha >= 0.5 * PI {
                    let d: Vec<f64> = (0..3).map(|_| gaussian(&mut g)).collect();
                    let l = norm(&d);
                    ([d[0] / l, d[1] / l, d[2] / l], 1.0 / (4.0 * PI))
                } else {
                    let i = g.gen_range(0..count);
                    let sign = if g.gen::<bool>() { 1.0 } else { -1.0 };
                    let axis: Vec<f64> = index.units[i].iter().map(|c| sign * c).collect();
                    let w = cap_point(&mut g, &axis, alpha);
                    index.near_axis(&w, alpha, &mut near);
                    let cos = alpha.cos();
                    let hits = near.iter().filter(|&&k| dot(&index.units[k as usize], &w).abs() > cos).count().max(1);
                    (w, hits as f64 / (2.0 * count as f64 * 2.0 * PI * (1.0 - cos)))
                };
                let x: Vec<f64> = ball.center.iter().zip(&w).map(|(c, d)| c + t * d).collect();
                let m = maximal_ball_at(ball, &index, r, &x, &mut scratch);
                let q = radius * t * t / density * m * m;
                s1 += q;
                s2 += q * q;
            }
            (s1, s2)
        })
        .collect();
    let (s1, s2) = parts.iter().fold((0.0, 0.0), |(a, b), (c, d)| (a + c, b + d));
    let n = samples as f64;
    let mean = s1 / n;
    let err = ((s2 / n - mean * mean).max(0.0) / n).sqrt();
    Ok(to_ratio(mean, err, ball.volume(), samples, radius, seed))
}

// 16-point Gauss–Legendre rule on [-1, 1] (nodes, weights).
const GL_NODES: [f64; 8] = [
    0.095_012_509_837_637_44,
    0.281_603_550_779_258_9,
    0.458_016_777_657_227_4,
    0.617_876_244_402_643_7,
    0.755_404_408_355_003,
    0.865_631_202_387_831_8,
    0.944_575_023_073_232_6,
    0.989_400_934_991_65,
];
const GL_WEIGHTS: [f64; 8] = [
    0.189_450_610_455_068_5,
    0.182_603_415_044_923_6,
    0.169_156_519_395_002_5,
    0.149_595_988_816_576_7,
    0.124_628_971_255_533_9,
    0.095_158_511_682_492_8,
    0.062_253_523_938_647_9,
    0.027_152_459_411_754_1,
];

/// `∫_a^b g` with the substitution `r = a + (b-a)(1-cos θ)/2`, which smooths
/// square-root behaviour at both ends, and Gauss–Legendre panels in `θ`.
fn clustered_integral<G: Fn(f64) -> f64>(a: f64, b: f64, g: &G) -> f64 {
    if !(b > a) {
        return 0.0;
    }
    let panels = 8;
    let width = PI / panels as f64;
    let mut acc = 0.0;
    for p in 0..panels {
        let mid = (p as f64 + 0.5) * width;
        for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
            for s in [-1.0, 1.0] {
                let th = mid + s * x * 0.5 * width;
                let r = a + (b - a) * 0.5 * (1.0 - th.cos());
                acc += w * 0.5 * width * g(r) * (b - a) * 0.5 * th.sin();
            }
        }
    }
    acc
}

/// Largest average of `1_{B(c, b)}` over tubes of radius `ρ` and length `L`
/// containing a point, for a ball whose centre lies at axial offset `a` and
/// perpendicular distance `p` from the point.
#[derive(Clone, Debug)]
pub struct TubeBallProfile {
    pub ball_radius: f64,
    pub tube_radius: f64,
    pub length: f64,
    table: Vec<f64>,
    table_step: f64,
    /// `|B ∩ T|` on an `(e, w0)` lattice for windows `[w0, ∞)` with `|w0| < b`.
    open: Vec<f64>,
}

const PROFILE_TABLE: usize = 4096;
const OPEN_TABLE: usize = 256;

impl TubeBallProfile {
    pub fn new(ball_radius: f64, tube_radius: f64, length: f64) -> Result<Self> {
        if !(ball_radius > 0.0 && tube_radius > 0.0 && length > 2.0 * ball_radius) {
            return Err(DirOpError::InvalidArgument("tube profile needs positive radii and a tube longer than the ball".into()));
        }
        let mut p = Self { ball_radius, tube_radius, length, table: Vec::new(), table_step: 0.0, open: Vec::new() };
        let emax = ball_radius + tube_radius;
        p.table_step = emax / PROFILE_TABLE as f64;
        p.table = (0..=PROFILE_TABLE)
            .map(|k| p.volume(k as f64 * p.table_step, f64::NEG_INFINITY, f64::INFINITY))
            .collect();
        let n = OPEN_TABLE + 1;
        p.open = (0..n * n)
            .map(|k| {
                let e = (k / n) as f64 * emax / OPEN_TABLE as f64;
                let w0 = ball_radius * (-1.0 + 2.0 * (k % n) as f64 / OPEN_TABLE as f64);
                p.volume(e, w0, f64::INFINITY)
            })
            .collect();
        Ok(p)
    }

    /// `|B ∩ T|` for a tube whose axis passes at distance `e` from the centre
    /// and whose axial window, measured from the centre, is `[w0, w1]`.
    pub fn volume(&self, e: f64, w0: f64, w1: f64) -> f64 {
        let (b, rho) = (self.ball_radius, self.tube_radius);
        let arc = |r: f64| -> f64 {
            if r <= 0.0 {
                return 0.0;
            }
            if r + e <= rho {
                return 2.0 * PI * r;
            }
            if r >= e + rho || r <= e - rho {
                return 0.0;
            }
            let c = ((r * r + e * e - rho * rho) / (2.0 * r * e)).clamp(-1.0, 1.0);
            2.0 * r * c.acos()
        };
        let chord = |r: f64| -> f64 {
            let h = (b * b - r * r).max(0.0).sqrt();
            (w1.min(h) - w0.max(-h)).max(0.0)
        };
        let mut cuts = vec![0.0, b];
        for c in [(e - rho).abs(), e + rho] {
            if c > 0.0 && c < b {
                cuts.push(c);
            }
        }
        for w in [w0, w1] {
            if w.is_finite() && w.abs() < b {
                cuts.push((b * b - w * w).sqrt());
            }
        }
        cuts.sort_by(f64::total_cmp);
        cuts.windows(2).map(|c| clustered_integral(c[0], c[1], &|r| arc(r) * chord(r))).sum()
    }

    fn full_window_volume(&self, e: f64) -> f64 {
        let u = e / self.table_step;
        let k = u.floor() as usize;
        if k >= PROFILE_TABLE {
            return 0.0;
        }
        let t = u - k as f64;
        self.table[k] * (1.0 - t) + self.table[k + 1] * t
    }

    /// Bilinear lookup of `|B ∩ T|` for the window `[w0, ∞)`.
    fn open_window_volume(&self, e: f64, w0: f64) -> f64 {
        let n = OPEN_TABLE + 1;
        let emax = self.ball_radius + self.tube_radius;
        let u = (e / emax * OPEN_TABLE as f64).clamp(0.0, OPEN_TABLE as f64);
        let w = ((w0 / self.ball_radius + 1.0) * 0.5 * OPEN_TABLE as f64).clamp(0.0, OPEN_TABLE as f64);
        let (i, j) = ((u.floor() as usize).min(OPEN_TABLE - 1), (w.floor() as usize).min(OPEN_TABLE - 1));
        let (s, t) = (u - i as f64, w - j as f64);
        let at = |a: usize, b: usize| self.open[a * n + b];
        (1.0 - s) * ((1.0 - t) * at(i, j) + t * at(i, j + 1)) + s * ((1.0 - t) * at(i + 1, j) + t * at(i + 1, j + 1))
    }

    /// Best tube average for a point at axial offset `a`, perpendicular
    /// distance `p` from the ball centre.
    pub fn best_average(&self, a: f64, p: f64) -> f64 {
        let e = (p - self.tube_radius).max(0.0);
        if e >= self.ball_radius + self.tube_radius {
            return 0.0;
        }
        let half = 0.5 * self.length;
        let c = 0.0f64.clamp(a - half, a + half);
        let tube = PI * self.tube_radius * self.tube_radius * self.length;
        let vol = if c.abs() <= half - self.ball_radius {
            self.full_window_volume(e)
        } else {
            // the far end of the window clears the ball, so only the near end cuts it
            self.open_window_volume(e, c.abs() - half)
        };
        vol / tube
    }
}

/// `M_{Z,δ} 1_B(x)` for unit tubes of width `δ` along the indexed directions.
pub fn nikodym_ball_at(ball: &Ball, profile: &TubeBallProfile, index: &DirectionIndex, x: &[f64], scratch: &mut Vec<u32>) -> f64 {
    let y: Vec<f64> = x.iter().zip(&ball.center).map(|(a, b)| a - b).collect();
    let dist = norm(&y);
    let reach = profile.ball_radius + profile.tube_radius;
    let alpha = if dist <= reach { PI } else { (reach / dist).asin() + 1e-9 };
    let u: Vec<f64> = if dist > 0.0 { y.iter().map(|t| t / dist).collect() } else { y.clone() };
    index.near_axis(&u, alpha, scratch);
    scratch
        .iter()
        .map(|&i| {
            let v = index.direction(i as usize);
            let l = norm(v);
            let a = dot(&y, v) / l;
            let p = (dot(&y, &y) - a * a).max(0.0).sqrt();
            profile.best_average(a, p)
        })
        .fold(0.0, f64::max)
}

/// `‖M_{Z,δ} 1_{B(0,δ)}‖_2 / ‖1_{B(0,δ)}‖_2` for unit tubes of width `δ` in `R^3`.
pub fn nikodym_ball_ratio(v: &DirectionSet, delta: f64, samples: usize, seed: u64) -> Result<NormSample> {
    if v.dim() != 3 {
        return Err(DirOpError::InvalidArgument("the tube route is three-dimensional".into()));
    }
    if !(delta > 0.0 && delta < 0.25) || samples == 0 {
        return Err(DirOpError::InvalidArgument(format!("need 0 < δ < 1/4 and samples > 0, got δ = {delta}")));
    }
    let ball = Ball::centered(3, delta)?;
    let profile = TubeBallProfile::new(delta, 0.5 * delta, 1.0)?;
    let index = DirectionIndex::new(v)?;
    let radius = 1.0 + 2.0 * delta + delta;
    let (i, e) = integrate_sq(3, radius, samples, seed, |x, s| nikodym_ball_at(&ball, &profile, &index, x, s));
    Ok(to_ratio(i, e, ball.volume(), samples, radius, seed))
}
