use std::path::Path;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use vardir_geonet::sampling::rng;
use vardir_geonet::{build_net, dist, dot, norm, DirectionSet, Manifold};
use vardir_poly::{Polynomial, PolySystem, Rational};
use vardir_variety::{newton_project, sample_variety, write_variety, NewtonOptions, Region, Tci, Variety, VarietyError, RANK_TOL};

use crate::error::PartitionError;
use crate::poly_partition::{approx_poly_partition, cell_bound, BoundingBox, PartitionOptions, PartitionResult};
use crate::probe::group_with;

/// Size of the random nudge applied to a direction `g` whose wall is degenerate.
pub const DIRECTION_NUDGE: f64 = 1e-9;

/// Partitions drawn per patch before a wall failure is reported.
const WALL_ATTEMPTS: usize = 4;

#[derive(Clone, Debug)]
pub struct DirectionOptions {
    /// Patches must have estimated Lipschitz constant below this.
    pub l_max: f64,
    /// Refinement levels of the direction set `G` (at most 3).
    pub max_levels: usize,
    pub wall_tol: f64,
    /// Samples used to certify each wall.
    pub cert_samples: usize,
    /// Variety samples assigned to cells for crossing counts.
    pub dense_samples: usize,
    /// Where walls and dense samples are drawn.
    pub region: Region,
}

impl Default for DirectionOptions {
    fn default() -> Self {
        Self { l_max: 2.0, max_levels: 3, wall_tol: 1e-9, cert_samples: 48, dense_samples: 20_000, region: Region::Ball(2.0) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum WallKind {
    /// `W_g = Z(P_1, …, P_{n−m}, T·g)`; `nudged` when `g` was perturbed to reach a TCI.
    Grassmannian { g: Vec<f64>, nudged: bool },
    /// `W_O = Z(P_1, …, P_{n−m}, Q_O∘Π + ε)` of one patch.
    Patch { patch: usize, epsilon: f64 },
}

#[derive(Clone, Debug)]
pub struct Wall {
    pub kind: WallKind,
    pub tci: Tci,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirCell {
    pub id: usize,
    /// Indices into the direction set.
    pub members: Vec<usize>,
    pub patch: usize,
}

/// A direction set aside because it lies within `delta` of a wall.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NearWall {
    pub index: usize,
    pub wall: usize,
    /// Distance to the wall point reached by Gauss–Newton projection.
    pub distance: f64,
}

#[derive(Clone, Debug)]
pub struct Patch {
    pub id: usize,
    /// Mean unit normal (hypersurfaces) or tangent (curves).
    pub frame: Vec<f64>,
    /// Rows of the projection `Π` onto the `m`-plane the patch is a graph over.
    pub basis: Vec<Vec<f64>>,
    pub lipschitz: f64,
    /// Direction indices of the patch, before wall excision by `Q_O`.
    pub members: Vec<usize>,
    /// Sign of `T·g` for every `g ∈ G`.
    pub signs: Vec<i8>,
    pub partition: PartitionResult,
    /// Index of `W_O` in the wall list, absent for a trivial partition.
    pub wall: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct DirectionPartition {
    pub n: usize,
    pub m: usize,
    pub e: u32,
    pub n_param: u32,
    pub delta: f64,
    pub total: usize,
    pub cells: Vec<DirCell>,
    pub walls: Vec<Wall>,
    pub v_times: Vec<NearWall>,
    pub patches: Vec<Patch>,
    /// Final direction set `G`.
    pub g: Vec<Vec<f64>>,
    /// Refinement level reached (0 = coordinate axes).
    pub level: usize,
    /// Notable events: nudged directions, empty walls, unmet preconditions.
    pub flags: Vec<String>,
    /// Dense variety samples and their cells, used by [`crossing_count`].
    pub samples: Vec<Vec<f64>>,
    pub sample_cell: Vec<Option<usize>>,
    pub plane_tol: f64,
}

impl DirectionPartition {
    /// `ceil((N/E)^m)`.
    pub fn cell_bound(&self) -> usize {
        cell_bound(self.n_param, self.e, self.m)
    }

    pub fn max_cell_size(&self) -> usize {
        self.cells.iter().map(|c| c.members.len()).max().unwrap_or(0)
    }

    /// `∑|V_C| + |V_×|`.
    pub fn accounted(&self) -> usize {
        self.cells.iter().map(|c| c.members.len()).sum::<usize>() + self.v_times.len()
    }

    pub fn max_wall_distance(&self) -> f64 {
        self.v_times.iter().map(|w| w.distance).fold(0.0, f64::max)
    }

    pub fn max_wall_degree(&self) -> u32 {
        self.walls.iter().map(|w| w.tci.degree()).max().unwrap_or(0)
    }

    pub fn to_record(&self) -> DirectionRecord {
        DirectionRecord {
            n: self.n,
            m: self.m,
            e: self.e,
            n_param: self.n_param,
            delta: self.delta,
            total: self.total,
            cells: self.cells.clone(),
            v_times: self.v_times.clone(),
            walls: self
                .walls
                .iter()
                .enumerate()
                .map(|(i, w)| WallRecord { file: wall_file_name(i), kind: w.kind.clone(), degree: w.tci.degree() })
                .collect(),
            g: self.g.clone(),
            level: self.level,
            flags: self.flags.clone(),
            lipschitz: self.patches.iter().map(|p| p.lipschitz).collect(),
        }
    }

    /// Writes `partition.json` plus one Variety file per wall into `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<(), PartitionError> {
        let io = |e: std::io::Error| PartitionError::InvalidArgument(format!("cannot write {}: {e}", dir.display()));
        std::fs::create_dir_all(dir).map_err(io)?;
        for (i, w) in self.walls.iter().enumerate() {
            std::fs::write(dir.join(wall_file_name(i)), write_variety(w.tci.variety())).map_err(io)?;
        }
        let json = serde_json::to_string_pretty(&self.to_record())
            .map_err(|e| PartitionError::InvalidArgument(format!("serialization failed: {e}")))?;
        std::fs::write(dir.join("partition.json"), json).map_err(io)
    }
}

fn wall_file_name(i: usize) -> String {
    format!("wall_{i:03}.var")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WallRecord {
    pub file: String,
    pub kind: WallKind,
    pub degree: u32,
}

/// JSON form of a [`DirectionPartition`]; walls are referenced by file name.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirectionRecord {
    pub n: usize,
    pub m: usize,
    pub e: u32,
    pub n_param: u32,
    pub delta: f64,
    pub total: usize,
    pub cells: Vec<DirCell>,
    pub v_times: Vec<NearWall>,
    pub walls: Vec<WallRecord>,
    pub g: Vec<Vec<f64>>,
    pub level: usize,
    pub flags: Vec<String>,
    pub lipschitz: Vec<f64>,
}

/// The field `T`: the gradient for hypersurfaces, `∇P_1 × ∇P_2` for curves in R³.
fn tangent_field(z: &Variety) -> Result<Vec<Polynomial<f64>>, PartitionError> {
    let gens = z.generators().polys();
    match (z.nvars(), z.dim()) {
        (n, m) if m + 1 == n => Ok(gens[0].gradient()),
        (3, 1) => {
            let a = gens[0].gradient();
            let b = gens[1].gradient();
            Ok(vec![&(&a[1] * &b[2]) - &(&a[2] * &b[1]), &(&a[2] * &b[0]) - &(&a[0] * &b[2]), &(&a[0] * &b[1]) - &(&a[1] * &b[0])])
        }
        (n, m) => Err(PartitionError::InvalidArgument(format!("(n, m) = ({n}, {m}) is not supported"))),
    }
}

fn eval_field(t: &[Polynomial<f64>], x: &[f64]) -> Vec<f64> {
    t.iter().map(|p| p.eval(x)).collect()
}

fn unit(v: &[f64]) -> Vec<f64> {
    let r = norm(v);
    v.iter().map(|x| x / r).collect()
}

fn normalized(p: Polynomial<f64>) -> Polynomial<f64> {
    let s = p.max_abs_coeff();
    if s > 0.0 { p.scale(&(1.0 / s)) } else { p }
}

/// `Z(P_1, …, P_c, extra)` with `extra` converted exactly.
fn with_extra(z: &Variety, extra: &Polynomial<f64>) -> Result<Variety, PartitionError> {
    let mut polys: Vec<Polynomial<Rational>> = z.exact().polys().to_vec();
    polys.push(extra.to_rational()?);
    Ok(Variety::new(PolySystem::new(polys)?, z.dim() - 1)?)
}

/// Direction sets `G` of increasing fineness.
fn direction_level(n: usize, level: usize, seed: u64) -> Result<Vec<Vec<f64>>, PartitionError> {
    let mut g: Vec<Vec<f64>> = (0..n).map(|k| (0..n).map(|j| if j == k { 1.0 } else { 0.0 }).collect()).collect();
    if level >= 1 {
        // every nonzero vector with entries in {−1, 0, 1}, up to sign
        let total = 3usize.pow(n as u32);
        for code in 0..total {
            let v: Vec<f64> = (0..n).map(|k| ((code / 3usize.pow(k as u32)) % 3) as f64 - 1.0).collect();
            if norm(&v) > 0.0 {
                g.push(unit(&v));
            }
        }
    }
    if level >= 2 {
        let net = build_net(&Manifold::Sphere { n }, 0.25, seed)?;
        g.extend(net.points().iter().cloned());
    }
    let mut out: Vec<Vec<f64>> = Vec::new();
    for v in g {
        if out.iter().all(|u| dot(u, &v).abs() < 1.0 - 1e-9) {
            out.push(v);
        }
    }
    Ok(out)
}

/// Distance from `x` to the point of `Z(sys)` reached by Gauss–Newton projection.
fn projected_distance(sys: &PolySystem<f64>, x: &[f64]) -> f64 {
    newton_project(sys, x, &NewtonOptions::default()).map_or(f64::INFINITY, |p| dist(x, &p))
}

struct GrassWalls {
    g: Vec<Vec<f64>>,
    walls: Vec<Wall>,
    /// Wall index for each entry of `g`, `None` when the wall has no points in the region.
    wall_of: Vec<Option<usize>>,
}

fn grassmannian_walls(
    z: &Variety,
    t: &[Polynomial<f64>],
    dirs: Vec<Vec<f64>>,
    opts: &DirectionOptions,
    seed: u64,
    flags: &mut Vec<String>,
) -> Result<GrassWalls, PartitionError> {
    let n = z.nvars();
    let mut out = GrassWalls { g: Vec::new(), walls: Vec::new(), wall_of: Vec::new() };
    for (k, g0) in dirs.into_iter().enumerate() {
        let mut g = g0.clone();
        let mut r = rng(seed ^ 0x6a11);
        r.set_stream(k as u64);
        let mut placed = None;
        for attempt in 0..6 {
            let tg = t.iter().zip(&g).fold(Polynomial::zero(n), |acc, (p, gi)| &acc + &p.scale(gi));
            if !tg.is_zero() {
                let v = with_extra(z, &normalized(tg))?;
                match Tci::certify_in(v, &opts.region, opts.cert_samples, RANK_TOL, seed.wrapping_add(k as u64)) {
                    Ok(tci) => {
                        placed = Some(Some(tci));
                        break;
                    }
                    Err(VarietyError::Indeterminate(_)) => {
                        flags.push(format!("wall for g = {g:?} has no points in the region"));
                        placed = Some(None);
                        break;
                    }
                    Err(VarietyError::NotTci { .. }) => {}
                    Err(e) => return Err(e.into()),
                }
            }
            if attempt == 5 {
                return Err(PartitionError::Wall { what: format!("W_g for g = {g0:?}") });
            }
            let nudge: Vec<f64> = (0..n).map(|_| r.gen_range(-1.0..1.0)).collect();
            g = unit(&g0.iter().zip(&nudge).map(|(a, b)| a + DIRECTION_NUDGE * b).collect::<Vec<_>>());
            flags.push(format!("direction {g0:?} nudged by {DIRECTION_NUDGE:e}"));
        }
        let nudged = g != g0;
        let idx = match placed.expect("loop either places or errors") {
            Some(tci) => {
                out.walls.push(Wall { kind: WallKind::Grassmannian { g: g.clone(), nudged }, tci });
                Some(out.walls.len() - 1)
            }
            None => None,
        };
        out.g.push(g);
        out.wall_of.push(idx);
    }
    Ok(out)
}

fn sign_pattern(t: &[Polynomial<f64>], g: &[Vec<f64>], x: &[f64]) -> Vec<i8> {
    let tx = eval_field(t, x);
    g.iter().map(|gi| if dot(&tx, gi) >= 0.0 { 1 } else { -1 }).collect()
}

/// Chord-projection probe: the chord `a → b` is walked in steps of at most `h`,
/// every step projected onto `Z`, and the sign pattern of `T·g` must stay fixed
/// with no jump between consecutive projections.
fn chord_connected(z: &Variety, t: &[Polynomial<f64>], g: &[Vec<f64>], a: &[f64], b: &[f64], h: f64) -> bool {
    let target = sign_pattern(t, g, a);
    if sign_pattern(t, g, b) != target {
        return false;
    }
    let steps = (dist(a, b) / h).ceil().max(1.0) as usize;
    let opts = NewtonOptions::default();
    let mut prev = a.to_vec();
    for k in 1..=steps {
        let s = k as f64 / steps as f64;
        let c: Vec<f64> = a.iter().zip(b).map(|(x, y)| x + s * (y - x)).collect();
        let Some(p) = newton_project(z.generators(), &c, &opts) else { return false };
        if dist(&p, &prev) > 3.0 * h || sign_pattern(t, g, &p) != target {
            return false;
        }
        prev = p;
    }
    true
}

/// Orthonormal basis of the orthogonal complement of `v`.
fn complement_basis(v: &[f64]) -> Vec<Vec<f64>> {
    let n = v.len();
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for k in 0..n {
        let mut e: Vec<f64> = (0..n).map(|j| if j == k { 1.0 } else { 0.0 }).collect();
        for u in std::iter::once(v).chain(basis.iter().map(|b| b.as_slice())) {
            let c = dot(&e, u);
            e.iter_mut().zip(u).for_each(|(x, y)| *x -= c * y);
        }
        if norm(&e) > 1e-6 && basis.len() + 1 < n {
            basis.push(unit(&e));
        }
    }
    basis
}

fn project(basis: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    basis.iter().map(|b| dot(b, x)).collect()
}

struct PatchGroup {
    members: Vec<usize>,
    signs: Vec<i8>,
    frame: Vec<f64>,
    lipschitz: f64,
}

fn patch_geometry(t: &[Polynomial<f64>], pts: &[Vec<f64>], members: &[usize]) -> (Vec<f64>, f64) {
    let dirs: Vec<Vec<f64>> = members.iter().map(|&i| unit(&eval_field(t, &pts[i]))).collect();
    let first = dirs[0].clone();
    let mut mean = vec![0.0; first.len()];
    for d in &dirs {
        let s = dot(d, &first).signum();
        mean.iter_mut().zip(d).for_each(|(m, x)| *m += s * x);
    }
    let frame = unit(&mean);
    let lipschitz = dirs
        .iter()
        .map(|d| {
            let c = dot(d, &frame).abs().min(1.0);
            (1.0 - c * c).sqrt() / c.max(1e-300)
        })
        .fold(0.0, f64::max);
    (frame, lipschitz)
}

/// Direction partition of `v ⊂ z` into cells of at most `ceil((N/E)^m)` points.
///
/// Walls are the Grassmannian walls `W_g`, for `g` in a direction set `G`
/// refined until every patch has Lipschitz estimate below `l_max`, and one wall
/// `W_O` per patch from a polynomial partition of the projected points. Points
/// within `delta` of some wall form `V_×`.
pub fn direction_partition(
    z: &Tci,
    v: &DirectionSet,
    n_param: u32,
    e: u32,
    delta: f64,
    seed: u64,
    opts: &DirectionOptions,
) -> Result<DirectionPartition, PartitionError> {
    let zv = z.variety();
    let (n, m) = (zv.nvars(), zv.dim());
    if !matches!((n, m), (2, 1) | (3, 1) | (3, 2)) {
        return Err(PartitionError::InvalidArgument(format!("(n, m) = ({n}, {m}) is not supported")));
    }
    if v.dim() != n {
        return Err(PartitionError::InvalidArgument(format!("directions live in R^{}, variety in R^{n}", v.dim())));
    }
    if e == 0 || n_param == 0 || !(delta > 0.0) {
        return Err(PartitionError::InvalidArgument("N, E and delta must be positive".into()));
    }
    if (v.len() as u128) > (n_param as u128).pow(m as u32) {
        return Err(PartitionError::InvalidArgument(format!("{} directions exceed N^m = {n_param}^{m}", v.len())));
    }
    let pts = v.points();
    if let Some(i) = pts.iter().position(|x| zv.residual(x) > 1e-6) {
        return Err(PartitionError::InvalidArgument(format!("direction {i} does not lie on the variety")));
    }
    let mut flags = Vec::new();
    let d = zv.degree() as u128;
    if (e as u128).pow(m as u32 - 1) < d.pow(n as u32) {
        flags.push(format!("E^(m-1) = {} is below D^n = {}", (e as u128).pow(m as u32 - 1), d.pow(n as u32)));
    }
    let t = tangent_field(zv)?;

    // Steps 1–2: Grassmannian walls, excision, Lipschitz patches.
    let mut level = 0;
    let (gw, near_g, groups) = loop {
        let mut level_flags = Vec::new();
        let gw = grassmannian_walls(zv, &t, direction_level(n, level, seed)?, opts, seed, &mut level_flags)?;
        let near_g: Vec<Option<(usize, f64)>> = pts
            .par_iter()
            .map(|x| {
                let mut best: Option<(usize, f64)> = None;
                for (wi, w) in gw.walls.iter().enumerate() {
                    let d = projected_distance(w.tci.variety().generators(), x);
                    if d < delta && best.is_none_or(|b| d < b.1) {
                        best = Some((wi, d));
                    }
                }
                best
            })
            .collect();
        let mut classes: Vec<(Vec<i8>, Vec<usize>)> = Vec::new();
        for (i, x) in pts.iter().enumerate() {
            if near_g[i].is_some() {
                continue;
            }
            let s = sign_pattern(&t, &gw.g, x);
            match classes.iter_mut().find(|c| c.0 == s) {
                Some(c) => c.1.push(i),
                None => classes.push((s, vec![i])),
            }
        }
        let h = 0.02;
        let mut groups = Vec::new();
        for (signs, members) in classes {
            for g in group_with(pts, &members, |a, b| chord_connected(zv, &t, &gw.g, a, b, h)) {
                let (frame, lipschitz) = patch_geometry(&t, pts, &g);
                groups.push(PatchGroup { members: g, signs: signs.clone(), frame, lipschitz });
            }
        }
        let worst = groups.iter().enumerate().map(|(i, g)| (i, g.lipschitz)).fold((0, 0.0), |a, b| if b.1 > a.1 { b } else { a });
        if worst.1 < opts.l_max {
            flags.extend(level_flags);
            break (gw, near_g, groups);
        }
        if level + 1 >= opts.max_levels.min(3) {
            return Err(PartitionError::Lipschitz { patch: worst.0, lipschitz: worst.1, levels: level + 1 });
        }
        level += 1;
    };

    // Step 3: per-patch partitions and their walls, run concurrently. A
    // partition whose wall cannot be certified is redrawn with a new seed.
    type PatchPart = (Vec<Vec<f64>>, PartitionResult, Option<(Tci, f64, Vec<f64>)>, usize);
    let part_results: Vec<Result<PatchPart, PartitionError>> = groups
        .par_iter()
        .enumerate()
        .map(|(pi, pg)| {
            let basis = if m + 1 == n { complement_basis(&pg.frame) } else { vec![pg.frame.clone()] };
            let ys: Vec<Vec<f64>> = pg.members.iter().map(|&i| project(&basis, &pts[i])).collect();
            let bbox = BoundingBox::enclosing(&ys)?;
            let mut attempt = 0;
            loop {
                let popts = PartitionOptions {
                    delta: delta / (1.0 + pg.lipschitz),
                    wall_tol: opts.wall_tol,
                    seed: seed.wrapping_add(pi as u64 * 0x51).wrapping_add(attempt as u64 * 0x7f4a_7c15),
                };
                let part = approx_poly_partition(&ys, n_param, e, &bbox, &popts)?;
                if part.q.is_constant() {
                    return Ok((basis, part, None, attempt));
                }
                let wall_pts: Vec<usize> = part.on_wall.iter().map(|&k| pg.members[k]).collect();
                match patch_wall(zv, &part, &basis, pts, &wall_pts, delta, opts, seed ^ pi as u64) {
                    Ok(w) => return Ok((basis, part, Some(w), attempt)),
                    Err(err) if attempt + 1 >= WALL_ATTEMPTS => return Err(err),
                    Err(_) => attempt += 1,
                }
            }
        })
        .collect();

    let mut walls = gw.walls;
    let mut v_times: Vec<NearWall> = near_g
        .iter()
        .enumerate()
        .filter_map(|(i, b)| b.map(|(wall, distance)| NearWall { index: i, wall, distance }))
        .collect();
    let mut cells = Vec::new();
    let mut patches = Vec::new();
    for (pi, (pg, res)) in groups.into_iter().zip(part_results).enumerate() {
        let (basis, part, certified, redraws) = res?;
        if redraws > 0 {
            flags.push(format!("patch {pi}: partition redrawn {redraws} times before its wall certified"));
        }
        let wall_pts: Vec<usize> = part.on_wall.iter().map(|&k| pg.members[k]).collect();
        let wall = if let Some((tci, epsilon, dists)) = certified {
            walls.push(Wall { kind: WallKind::Patch { patch: pi, epsilon }, tci });
            let wi = walls.len() - 1;
            for (&i, d) in wall_pts.iter().zip(dists) {
                v_times.push(NearWall { index: i, wall: wi, distance: d });
            }
            Some(wi)
        } else {
            None
        };
        for c in &part.cells {
            cells.push(DirCell { id: cells.len(), members: c.members.iter().map(|&k| pg.members[k]).collect(), patch: pi });
        }
        patches.push(Patch {
            id: pi,
            frame: pg.frame,
            basis,
            lipschitz: pg.lipschitz,
            members: pg.members,
            signs: pg.signs,
            partition: part,
            wall,
        });
    }
    v_times.sort_by_key(|w| w.index);

    let mut dp = DirectionPartition {
        n,
        m,
        e,
        n_param,
        delta,
        total: v.len(),
        cells,
        walls,
        v_times,
        patches,
        g: gw.g,
        level,
        flags,
        samples: Vec::new(),
        sample_cell: Vec::new(),
        plane_tol: 0.0,
    };
    assign_samples(&mut dp, zv, &t, pts, opts, seed)?;
    Ok(dp)
}

/// Builds `W_O` with the largest `ε` of the scan `{1, 1/2, 1/5}·10^{-k}`, `k = 2..12` (relative to
/// the normalized `Q_O∘Π`) that certifies as a TCI and keeps every on-wall
/// direction within `delta`.
#[allow(clippy::too_many_arguments)]
fn patch_wall(
    z: &Variety,
    part: &PartitionResult,
    basis: &[Vec<f64>],
    pts: &[Vec<f64>],
    wall_pts: &[usize],
    delta: f64,
    opts: &DirectionOptions,
    seed: u64,
) -> Result<(Tci, f64, Vec<f64>), PartitionError> {
    let n = z.nvars();
    let pi: Vec<Polynomial<f64>> = basis
        .iter()
        .map(|b| b.iter().enumerate().fold(Polynomial::zero(n), |acc, (k, c)| &acc + &Polynomial::variable(n, k).scale(c)))
        .collect();
    let q = normalized(part.q.compose(&pi)?);
    let scan = (2..=12).flat_map(|k| [1.0, 0.5, 0.2].map(|m| (k, m * 10f64.powi(-k))));
    for (k, eps) in scan {
        let wall = with_extra(z, &(&q + &Polynomial::constant(n, eps)))?;
        let dists: Vec<f64> = wall_pts.iter().map(|&i| projected_distance(wall.generators(), &pts[i])).collect();
        if dists.iter().any(|d| !(*d < delta)) {
            continue;
        }
        if let Ok(tci) = Tci::certify_in(wall, &opts.region, opts.cert_samples, RANK_TOL, seed.wrapping_add(k as u64)) {
            return Ok((tci, eps, dists));
        }
    }
    Err(PartitionError::Wall { what: format!("W_O of degree {}", q.degree().unwrap_or(0)) })
}

/// Dense variety samples, each assigned to the cell of its nearest direction
/// among cells with matching sign patterns.
fn assign_samples(
    dp: &mut DirectionPartition,
    z: &Variety,
    t: &[Polynomial<f64>],
    pts: &[Vec<f64>],
    opts: &DirectionOptions,
    seed: u64,
) -> Result<(), PartitionError> {
    let samples = sample_variety(z, &opts.region, opts.dense_samples.max(1), seed ^ 0xd5e)?.points;
    // reach: samples farther than this from every direction are left unassigned
    let spacing = pts
        .iter()
        .enumerate()
        .map(|(i, p)| pts.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, q)| dist(p, q)).fold(f64::INFINITY, f64::min))
        .filter(|d| d.is_finite())
        .fold(0.0, f64::max);
    let reach = if spacing > 0.0 { 3.0 * spacing } else { f64::INFINITY };
    let cell_of_point: Vec<Option<usize>> = {
        let mut out = vec![None; pts.len()];
        for c in &dp.cells {
            for &i in &c.members {
                out[i] = Some(c.id);
            }
        }
        out
    };
    let assigned: Vec<Option<usize>> = samples
        .par_iter()
        .map(|y| {
            let sg = sign_pattern(t, &dp.g, y);
            let mut best: Option<(usize, f64)> = None;
            for p in dp.patches.iter().filter(|p| p.signs == sg) {
                let py = project(&p.basis, y);
                let fs: Vec<bool> = p.partition.factors.iter().map(|f| f.eval(&py) > 0.0).collect();
                for c in &p.partition.cells {
                    if c.signs.iter().map(|s| *s > 0).ne(fs.iter().copied()) {
                        continue;
                    }
                    for &k in &c.members {
                        let i = p.members[k];
                        let d = dist(y, &pts[i]);
                        if d < reach && best.is_none_or(|b| d < b.1) {
                            best = Some((i, d));
                        }
                    }
                }
            }
            best.and_then(|(i, _)| cell_of_point[i])
        })
        .collect();
    let mut nn: Vec<f64> = samples
        .iter()
        .take(200)
        .map(|a| samples.iter().filter(|b| *b != a).map(|b| dist(a, b)).fold(f64::INFINITY, f64::min))
        .filter(|d| d.is_finite())
        .collect();
    nn.sort_by(f64::total_cmp);
    dp.plane_tol = nn.get(nn.len() / 2).copied().unwrap_or(dp.delta);
    dp.samples = samples;
    dp.sample_cell = assigned;
    Ok(())
}

/// Number of cells meeting the hyperplane `ξ·x = a`.
///
/// A cell meets it when a member direction or an assigned sample lies within
/// `plane_tol` of it, or when its points fall on both sides.
pub fn crossing_count(dp: &DirectionPartition, v: &DirectionSet, xi: &[f64], a: f64) -> usize {
    let mut state = vec![(false, false, false); dp.cells.len()];
    let mut visit = |c: usize, x: &[f64]| {
        let h = dot(xi, x) - a;
        let s = &mut state[c];
        if h.abs() < dp.plane_tol {
            s.0 = true;
        }
        if h < 0.0 {
            s.1 = true;
        } else {
            s.2 = true;
        }
    };
    for c in &dp.cells {
        for &i in &c.members {
            visit(c.id, &v.points()[i]);
        }
    }
    for (y, c) in dp.samples.iter().zip(&dp.sample_cell) {
        if let Some(c) = c {
            visit(*c, y);
        }
    }
    state.iter().filter(|s| s.0 || (s.1 && s.2)).count()
}

/// One row of a crossing audit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossingRow {
    pub xi: Vec<f64>,
    pub a: f64,
    pub count: usize,
    /// `ξ` was nudged because `Z ∩ {ξ·x = a}` did not certify as a TCI.
    pub nudged: bool,
}

/// Crossing counts for `planes` random unit `ξ` with `a ∈ {+offset, −offset}`,
/// evaluated concurrently.
pub fn crossing_audit(
    dp: &DirectionPartition,
    z: &Tci,
    v: &DirectionSet,
    planes: usize,
    offset: f64,
    seed: u64,
) -> Result<Vec<CrossingRow>, PartitionError> {
    let n = dp.n;
    (0..planes)
        .into_par_iter()
        .map(|k| {
            let mut r = rng(seed);
            r.set_stream(k as u64);
            let mut xi = vardir_geonet::sampling::random_unit_vector(&mut r, n);
            let a = if k % 2 == 0 { offset } else { -offset };
            let mut nudged = false;
            if dp.m >= 2 {
                for attempt in 0..3 {
                    let lin = Polynomial::from_terms(
                        n,
                        (0..n)
                            .map(|j| (xi[j], (0..n).map(|i| u32::from(i == j)).collect()))
                            .chain(std::iter::once((-a, vec![0; n]))),
                    )?;
                    let slice = with_extra(z.variety(), &lin)?;
                    match Tci::certify_in(slice, &Region::Ball(2.0), 16, RANK_TOL, seed ^ k as u64) {
                        Err(VarietyError::NotTci { .. }) if attempt < 2 => {
                            xi = unit(&xi.iter().map(|x| x + DIRECTION_NUDGE * r.gen_range(-1.0..1.0)).collect::<Vec<_>>());
                            nudged = true;
                        }
                        _ => break,
                    }
                }
            }
            let count = crossing_count(dp, v, &xi, a);
            Ok(CrossingRow { xi, a, count, nudged })
        })
        .collect()
}

/// CSV with header `xi_1,…,xi_n,a,count,nudged`.
pub fn write_crossing_csv<W: std::io::Write>(rows: &[CrossingRow], w: W) -> Result<(), PartitionError> {
    let err = |e: csv::Error| PartitionError::InvalidArgument(format!("csv: {e}"));
    let mut out = csv::Writer::from_writer(w);
    let n = rows.first().map_or(0, |r| r.xi.len());
    let mut header: Vec<String> = (1..=n).map(|k| format!("xi_{k}")).collect();
    header.extend(["a".into(), "count".into(), "nudged".into()]);
    out.write_record(&header).map_err(err)?;
    for r in rows {
        let mut rec: Vec<String> = r.xi.iter().map(|x| format!("{x:.17e}")).collect();
        rec.extend([format!("{:.17e}", r.a), r.count.to_string(), r.nudged.to_string()]);
        out.write_record(&rec).map_err(err)?;
    }
    out.flush().map_err(|e| PartitionError::InvalidArgument(format!("csv: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complement_is_orthonormal() {
        let v = unit(&[1.0, 2.0, -0.5]);
        let b = complement_basis(&v);
        assert_eq!(b.len(), 2);
        for (i, x) in b.iter().enumerate() {
            assert!(dot(x, &v).abs() < 1e-12);
            assert!((norm(x) - 1.0).abs() < 1e-12);
            for y in &b[i + 1..] {
                assert!(dot(x, y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn direction_levels_grow_without_antipodes() {
        let l0 = direction_level(3, 0, 1).unwrap();
        let l1 = direction_level(3, 1, 1).unwrap();
        assert_eq!(l0.len(), 3);
        assert_eq!(l1.len(), 13);
        assert_eq!(direction_level(2, 1, 1).unwrap().len(), 4);
    }
}
