use serde::{Deserialize, Serialize};
use vardir_geonet::dist;
use vardir_poly::{monomials_up_to, veronese_dim, veronese_lift, write_polynomial, Polynomial};

use crate::error::PartitionError;
use crate::ham::{ham_sandwich_bisect, Hyperplane};
use crate::probe::probe_groups;

/// Highest Veronese degree tried before a round gives up on simultaneous bisection.
pub const MAX_LIFT_DEGREE: u32 = 6;

/// Axis-aligned box `[lo_i, hi_i]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoundingBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self, PartitionError> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(PartitionError::InvalidArgument("box corners must have equal, positive dimension".into()));
        }
        if lo.iter().zip(&hi).any(|(l, h)| !(l <= h) || !l.is_finite() || !h.is_finite()) {
            return Err(PartitionError::InvalidArgument("box needs finite lo ≤ hi".into()));
        }
        Ok(Self { lo, hi })
    }

    /// Smallest box containing every point, padded by 1% of its extent.
    pub fn enclosing(points: &[Vec<f64>]) -> Result<Self, PartitionError> {
        let first = points.first().ok_or_else(|| PartitionError::InvalidArgument("no points".into()))?;
        let mut lo = first.clone();
        let mut hi = first.clone();
        for p in points {
            for (k, v) in p.iter().enumerate() {
                lo[k] = lo[k].min(*v);
                hi[k] = hi[k].max(*v);
            }
        }
        for k in 0..lo.len() {
            let pad = 0.01 * (hi[k] - lo[k]).max(1e-9);
            lo[k] -= pad;
            hi[k] += pad;
        }
        Self::new(lo, hi)
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter().zip(self.lo.iter().zip(&self.hi)).all(|(v, (l, h))| *v >= *l && *v <= *h)
    }

    fn center(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(l, h)| 0.5 * (l + h)).collect()
    }

    fn half_widths(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(l, h)| (0.5 * (h - l)).max(1e-12)).collect()
    }

    /// Maps the box onto `[-1, 1]^n`.
    fn normalize(&self, x: &[f64]) -> Vec<f64> {
        let (c, h) = (self.center(), self.half_widths());
        x.iter().enumerate().map(|(k, v)| (v - c[k]) / h[k]).collect()
    }

    /// `[c_k + h_k y_k]`, for composing a polynomial in `x` into normalized coordinates.
    fn to_box_coords(&self) -> Vec<Polynomial<f64>> {
        let (c, h) = (self.center(), self.half_widths());
        let n = self.dim();
        (0..n).map(|k| &Polynomial::constant(n, c[k]) + &Polynomial::variable(n, k).scale(&h[k])).collect()
    }

    /// `[(x_k − c_k) / h_k]`, the inverse substitution.
    fn from_box_coords(&self) -> Vec<Polynomial<f64>> {
        let (c, h) = (self.center(), self.half_widths());
        let n = self.dim();
        (0..n).map(|k| &Polynomial::variable(n, k).scale(&(1.0 / h[k])) - &Polynomial::constant(n, c[k] / h[k])).collect()
    }
}

/// One cell: indices sharing the sign of every partition factor and joined by probing paths.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub id: usize,
    pub members: Vec<usize>,
    /// Sign of each factor of `Q` on the cell.
    pub signs: Vec<i8>,
}

/// Per-round log of the bisection construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundLog {
    /// Sign classes with at least two points that were bisected this round.
    pub classes: usize,
    /// Veronese degree of each factor added this round.
    pub lift_degrees: Vec<u32>,
}

#[derive(Clone, Debug)]
pub struct PartitionOptions {
    /// Required distance bound between on-wall points and `Z(Q + ε)`.
    pub delta: f64,
    /// Points with `|Q| < wall_tol` are on the wall.
    pub wall_tol: f64,
    pub seed: u64,
}

impl Default for PartitionOptions {
    fn default() -> Self {
        Self { delta: 1e-3, wall_tol: 1e-9, seed: 0x9a27 }
    }
}

#[derive(Clone, Debug)]
pub struct PartitionResult {
    /// The partitioning polynomial `q_scale · ∏ factors`.
    pub q: Polynomial<f64>,
    pub q_scale: f64,
    pub factors: Vec<Polynomial<f64>>,
    pub cells: Vec<Cell>,
    pub on_wall: Vec<usize>,
    pub e: u32,
    pub n: u32,
    pub bbox: BoundingBox,
    /// Perturbation with every on-wall point within `delta` of `Z(Q + ε)`.
    pub epsilon: f64,
    /// Largest on-wall distance to `Z(Q + ε)`; zero when nothing is on the wall.
    pub wall_distance: f64,
    pub rounds: Vec<RoundLog>,
}

impl PartitionResult {
    /// `ceil((N/E)^n)`.
    pub fn cell_bound(&self) -> usize {
        cell_bound(self.n, self.e, self.bbox.dim())
    }

    pub fn degree(&self) -> u32 {
        self.q.degree().unwrap_or(0)
    }

    pub fn max_cell_size(&self) -> usize {
        self.cells.iter().map(|c| c.members.len()).max().unwrap_or(0)
    }

    /// Index → cell id, `None` on the wall.
    pub fn labels(&self, len: usize) -> Vec<Option<usize>> {
        let mut out = vec![None; len];
        for c in &self.cells {
            for &i in &c.members {
                out[i] = Some(c.id);
            }
        }
        out
    }

    pub fn to_record(&self) -> Result<PartitionRecord, PartitionError> {
        Ok(PartitionRecord {
            q: write_polynomial(&self.q.to_rational()?),
            degree: self.degree(),
            cells: self.cells.clone(),
            on_wall: self.on_wall.clone(),
            e: self.e,
            n: self.n,
            bbox: self.bbox.clone(),
            epsilon: self.epsilon,
            wall_distance: self.wall_distance,
            rounds: self.rounds.clone(),
        })
    }
}

/// Serializable form of a [`PartitionResult`] with `Q` in exact text form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionRecord {
    pub q: String,
    pub degree: u32,
    pub cells: Vec<Cell>,
    pub on_wall: Vec<usize>,
    pub e: u32,
    pub n: u32,
    pub bbox: BoundingBox,
    pub epsilon: f64,
    pub wall_distance: f64,
    pub rounds: Vec<RoundLog>,
}

pub(crate) fn cell_bound(n: u32, e: u32, dim: usize) -> usize {
    let num = (n as u128).pow(dim as u32);
    let den = (e as u128).pow(dim as u32);
    num.div_ceil(den) as usize
}

/// Fewest rounds `r` with `2^r ≥ E^n`, i.e. `⌈n log₂ E⌉`.
pub fn round_count(e: u32, dim: usize) -> usize {
    let target = (e as u128).pow(dim as u32);
    let mut r = 0;
    while (1u128 << r) < target {
        r += 1;
    }
    r
}

/// Polynomial `w · lift_d(y) − b` in the lifted coordinates.
fn lifted_factor(h: &Hyperplane, dim: usize, d: u32) -> Result<Polynomial<f64>, PartitionError> {
    let mons = monomials_up_to(dim, d);
    let mut terms: Vec<(f64, Vec<u32>)> = mons.into_iter().zip(&h.w).map(|(m, w)| (*w, m)).collect();
    terms.push((-h.b, vec![0; dim]));
    let p = Polynomial::from_terms(dim, terms)?;
    let s = p.max_abs_coeff();
    Ok(if s > 0.0 { p.scale(&(1.0 / s)) } else { p })
}

fn sign_of(v: f64, tol: f64) -> i8 {
    if v.abs() < tol {
        0
    } else if v > 0.0 {
        1
    } else {
        -1
    }
}

/// Labels after grouping by sign and probing.
///
/// Points with `|Q| < wall_tol` get `None`. The rest share a label exactly when
/// probing joined them; pairs probing cannot decide stay apart.
pub fn cell_assign(points: &[Vec<f64>], q: &Polynomial<f64>, bbox: &BoundingBox, wall_tol: f64) -> Result<Vec<Option<usize>>, PartitionError> {
    if !(wall_tol > 0.0) {
        return Err(PartitionError::InvalidArgument(format!("wall_tol must be positive, got {wall_tol}")));
    }
    let keys: Vec<Option<Vec<i8>>> = points
        .iter()
        .map(|x| {
            let s = sign_of(q.eval(x), wall_tol);
            (s != 0).then(|| vec![s])
        })
        .collect();
    let groups = group_and_probe(points, std::slice::from_ref(q), bbox, wall_tol, &keys)?;
    let mut out = vec![None; points.len()];
    for (id, (_, members)) in groups.into_iter().enumerate() {
        for i in members {
            out[i] = Some(id);
        }
    }
    Ok(out)
}

/// Groups points by `keys`, then splits every group by probing in box coordinates.
fn group_and_probe(
    points: &[Vec<f64>],
    factors: &[Polynomial<f64>],
    bbox: &BoundingBox,
    wall_tol: f64,
    keys: &[Option<Vec<i8>>],
) -> Result<Vec<(Vec<i8>, Vec<usize>)>, PartitionError> {
    let subs = bbox.to_box_coords();
    let fy: Vec<Polynomial<f64>> = factors.iter().map(|f| f.compose(&subs)).collect::<Result<_, _>>()?;
    let ys: Vec<Vec<f64>> = points.iter().map(|x| bbox.normalize(x)).collect();
    let mut classes: Vec<(Vec<i8>, Vec<usize>)> = Vec::new();
    for (i, k) in keys.iter().enumerate() {
        if let Some(k) = k {
            match classes.iter_mut().find(|c| &c.0 == k) {
                Some(c) => c.1.push(i),
                None => classes.push((k.clone(), vec![i])),
            }
        }
    }
    let mut out = Vec::new();
    for (key, members) in classes {
        for g in probe_groups(&fy, &ys, &members, wall_tol) {
            out.push((key.clone(), g));
        }
    }
    Ok(out)
}

/// Approximate polynomial partitioning of at most `N^n` points.
///
/// Runs `⌈n log₂ E⌉` rounds. Each round bisects every current sign class with at
/// least two points by one hyperplane in a Veronese lift of the box-normalized
/// coordinates, so every class at most halves. `Q` is the product of the cuts;
/// cells are the sign classes split by probing, and each has at most
/// `ceil((N/E)^n)` points. Points with `|Q| < wall_tol` form the wall, and `ε`
/// is the largest value of the scan `‖Q‖·10^{-2}, …, ‖Q‖·10^{-12}` placing all
/// of them within `delta` of `Z(Q + ε)`.
pub fn approx_poly_partition(
    points: &[Vec<f64>],
    n_param: u32,
    e: u32,
    bbox: &BoundingBox,
    opts: &PartitionOptions,
) -> Result<PartitionResult, PartitionError> {
    let dim = bbox.dim();
    if e == 0 || n_param == 0 {
        return Err(PartitionError::InvalidArgument("N and E must be at least 1".into()));
    }
    if points.iter().any(|p| p.len() != dim) {
        return Err(PartitionError::InvalidArgument(format!("points must lie in R^{dim}")));
    }
    if (points.len() as u128) > (n_param as u128).pow(dim as u32) {
        return Err(PartitionError::InvalidArgument(format!("{} points exceed N^n = {n_param}^{dim}", points.len())));
    }
    if !(opts.delta > 0.0) || !(opts.wall_tol > 0.0) {
        return Err(PartitionError::InvalidArgument("delta and wall_tol must be positive".into()));
    }
    let ys: Vec<Vec<f64>> = points.iter().map(|x| bbox.normalize(x)).collect();
    let mut factors_y: Vec<Polynomial<f64>> = Vec::new();
    let mut signs: Vec<Vec<i8>> = vec![Vec::new(); points.len()];
    let mut rounds = Vec::new();
    for round in 0..round_count(e, dim) {
        let mut classes: Vec<(Vec<i8>, Vec<usize>)> = Vec::new();
        for (i, s) in signs.iter().enumerate() {
            if s.contains(&0) {
                continue;
            }
            match classes.iter_mut().find(|c| &c.0 == s) {
                Some(c) => c.1.push(i),
                None => classes.push((s.clone(), vec![i])),
            }
        }
        let active: Vec<Vec<Vec<f64>>> = classes
            .iter()
            .filter(|c| c.1.len() >= 2)
            .map(|c| c.1.iter().map(|&i| ys[i].clone()).collect())
            .collect();
        let seed = opts.seed.wrapping_add(round as u64 * 0x9e37);
        let cuts = bisect_all(&active, dim, seed)?;
        let lift_degrees = cuts.iter().map(|c| c.1).collect();
        for (h, d) in &cuts {
            // signs come from the same tolerance-aware side test that verified the cut
            for (i, y) in ys.iter().enumerate() {
                signs[i].push(h.side(&veronese_lift(y, *d)));
            }
            factors_y.push(lifted_factor(h, dim, *d)?);
        }
        rounds.push(RoundLog { classes: active.len(), lift_degrees });
    }

    let back = bbox.from_box_coords();
    let factors: Vec<Polynomial<f64>> = factors_y.iter().map(|f| f.compose(&back)).collect::<Result<_, _>>()?;
    let q_scale = wall_scale(&factors, points, opts);
    let q = factors.iter().fold(Polynomial::constant(dim, q_scale), |acc, f| &acc * f);

    let keys: Vec<Option<Vec<i8>>> = points
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let s = &signs[i];
            (q.eval(x).abs() >= opts.wall_tol && !s.contains(&0)).then(|| s.clone())
        })
        .collect();
    let on_wall: Vec<usize> = (0..points.len()).filter(|&i| keys[i].is_none()).collect();
    let groups = group_and_probe(points, &factors, bbox, opts.wall_tol / q_scale, &keys)?;
    let cells: Vec<Cell> =
        groups.into_iter().enumerate().map(|(id, (signs, members))| Cell { id, members, signs }).collect();

    let wall_pts: Vec<Vec<f64>> = on_wall.iter().map(|&i| points[i].clone()).collect();
    let scaled: Vec<Polynomial<f64>> =
        std::iter::once(Polynomial::constant(dim, q_scale)).chain(factors.iter().cloned()).collect();
    let (epsilon, wall_distance) = scan_epsilon(&scaled, points, &wall_pts, opts.delta)?;
    let result = PartitionResult { q, q_scale, factors, cells, on_wall, e, n: n_param, bbox: bbox.clone(), epsilon, wall_distance, rounds };
    debug_assert!(result.max_cell_size() <= result.cell_bound());
    Ok(result)
}

/// Factors bisecting every set, one simultaneous cut when possible.
///
/// The lift degree starts at the least `d` with `veronese_dim(n, d) ≥ k` and is
/// raised up to [`MAX_LIFT_DEGREE`]; past that the sets are split into two
/// groups handled by separate factors.
fn bisect_all(sets: &[Vec<Vec<f64>>], dim: usize, seed: u64) -> Result<Vec<(Hyperplane, u32)>, PartitionError> {
    if sets.is_empty() {
        return Ok(Vec::new());
    }
    let k = sets.len();
    let mut d = 1;
    while veronese_dim(dim, d) < k {
        d += 1;
    }
    loop {
        let lifted: Vec<Vec<Vec<f64>>> = sets.iter().map(|s| s.iter().map(|y| veronese_lift(y, d)).collect()).collect();
        match ham_sandwich_bisect(&lifted, seed ^ d as u64) {
            Ok(h) => return Ok(vec![(h, d)]),
            Err(err @ PartitionError::BisectionBudget { .. }) if d >= MAX_LIFT_DEGREE && k == 1 => return Err(err),
            Err(PartitionError::BisectionBudget { .. }) => {}
            Err(err) => return Err(err),
        }
        if d >= MAX_LIFT_DEGREE {
            break;
        }
        d += 1;
    }
    let (a, b) = sets.split_at(k / 2);
    let mut out = bisect_all(a, dim, seed.wrapping_add(1))?;
    out.extend(bisect_all(b, dim, seed.wrapping_add(2))?);
    Ok(out)
}

/// Constant `c ≥ 1` making `|c ∏ f_j| ≥ 2·wall_tol` at every point whose
/// first-order distance to the cuts, `min_j |f_j| / |∇f_j|`, is at least `δ/2`.
///
/// A product of several moderately small factors can fall under `wall_tol` far
/// from every cut; rescaling keeps such points off the wall.
fn wall_scale(factors: &[Polynomial<f64>], points: &[Vec<f64>], opts: &PartitionOptions) -> f64 {
    let mut m = f64::INFINITY;
    for x in points {
        let mut prod = 1.0f64;
        let mut near = f64::INFINITY;
        for f in factors {
            let (v, g) = f.evaluate_with_gradient(x).expect("dimension checked by caller");
            let gn = g.iter().map(|t| t * t).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
            near = near.min(v.abs() / gn);
            prod *= v;
        }
        if near >= 0.5 * opts.delta {
            m = m.min(prod.abs());
        }
    }
    if m.is_finite() && m > 0.0 {
        (2.0 * opts.wall_tol / m).max(1.0)
    } else {
        1.0
    }
}

/// `Q = ∏ f_j` and its gradient, evaluated factor by factor.
fn product_with_gradient(factors: &[Polynomial<f64>], x: &[f64]) -> (f64, Vec<f64>) {
    let mut value = 1.0;
    let mut grad = vec![0.0; x.len()];
    for f in factors {
        let (v, g) = f.evaluate_with_gradient(x).expect("dimension checked by caller");
        for k in 0..x.len() {
            grad[k] = grad[k] * v + value * g[k];
        }
        value *= v;
    }
    (value, grad)
}

/// Newton projection of `x0` onto `Z(∏ f_j + ε)` along gradients.
fn project_product(factors: &[Polynomial<f64>], eps: f64, x0: &[f64]) -> Option<Vec<f64>> {
    let mut x = x0.to_vec();
    for _ in 0..100 {
        let (q, g) = product_with_gradient(factors, &x);
        let r = q + eps;
        if r.abs() <= 1e-3 * eps.abs() {
            return Some(x);
        }
        let gg: f64 = g.iter().map(|v| v * v).sum();
        if !(gg > 0.0) || !gg.is_finite() {
            return None;
        }
        let mut step: Vec<f64> = g.iter().map(|v| r * v / gg).collect();
        let len = step.iter().map(|v| v * v).sum::<f64>().sqrt();
        if len > 0.1 {
            step.iter_mut().for_each(|v| *v *= 0.1 / len);
        }
        x.iter_mut().zip(&step).for_each(|(xi, si)| *xi -= si);
    }
    None
}

/// Largest `ε` of the geometric scan with every point within `delta` of `Z(Q + ε)`.
///
/// `ε` runs over `scale·10^{-2}, …, scale·10^{-12}` with `scale = max |Q|` over
/// `all_pts`.
pub(crate) fn scan_epsilon(
    factors: &[Polynomial<f64>],
    all_pts: &[Vec<f64>],
    wall_pts: &[Vec<f64>],
    delta: f64,
) -> Result<(f64, f64), PartitionError> {
    let scale = all_pts
        .iter()
        .map(|x| product_with_gradient(factors, x).0.abs())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    if wall_pts.is_empty() {
        return Ok((scale * 1e-2, 0.0));
    }
    for k in 2..=12 {
        let eps = scale * 10f64.powi(-k);
        let worst = wall_pts
            .iter()
            .map(|x| project_product(factors, eps, x).map_or(f64::INFINITY, |p| dist(x, &p)))
            .fold(0.0, f64::max);
        if worst < delta {
            return Ok((eps, worst));
        }
    }
    Err(PartitionError::Wall { what: "Z(Q + ε)".into() })
}
