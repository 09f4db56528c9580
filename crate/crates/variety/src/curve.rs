use std::collections::HashMap;
use std::io::Write;

use vardir_geonet::sampling::fibonacci_point;
use vardir_geonet::{dist, dot};
use vardir_poly::{Polynomial, PolySystem};

use crate::error::VarietyError;
use crate::newton::{newton_project, NewtonOptions};
use crate::variety::Variety;

#[derive(Clone, Debug)]
pub struct TraceOptions {
    /// Continuation step length.
    pub resolution: f64,
    /// Spacing of the Fibonacci seed grid used to find every component.
    pub seed_spacing: f64,
    pub max_steps: usize,
}

impl Default for TraceOptions {
    fn default() -> Self {
        Self { resolution: 1e-3, seed_spacing: 0.02, max_steps: 2_000_000 }
    }
}

/// Traced components of a curve `Z(P, P_sph)` on `S^2`, each an ordered polyline.
#[derive(Clone, Debug)]
pub struct CurveComponents {
    pub components: Vec<Vec<[f64; 3]>>,
    pub closed: Vec<bool>,
    pub resolution: f64,
    pub merge_tol: f64,
    generators: PolySystem<f64>,
}

impl CurveComponents {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn generators(&self) -> &PolySystem<f64> {
        &self.generators
    }

    /// Rows `component,index,x,y,z`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "component,index,x,y,z")?;
        for (c, comp) in self.components.iter().enumerate() {
            for (i, p) in comp.iter().enumerate() {
                writeln!(w, "{c},{i},{:?},{:?},{:?}", p[0], p[1], p[2])?;
            }
        }
        Ok(())
    }

    /// Every polyline vertex, component after component.
    pub fn all_points(&self) -> Vec<Vec<f64>> {
        self.components.iter().flatten().map(|p| p.to_vec()).collect()
    }
}

/// `Z(P, x^2 + y^2 + z^2 − 1)` as a one-dimensional variety.
pub fn sphere_curve(p: &Polynomial<f64>) -> Result<Variety, VarietyError> {
    if p.nvars() != 3 {
        return Err(VarietyError::InvalidArgument("curves on S^2 need polynomials in 3 variables".into()));
    }
    let sph = Polynomial::from_terms(
        3,
        vec![(1.0, vec![2, 0, 0]), (1.0, vec![0, 2, 0]), (1.0, vec![0, 0, 2]), (-1.0, vec![0, 0, 0])],
    )?;
    Variety::from_float(PolySystem::new(vec![p.clone(), sph])?, 1)
}

fn cross(a: &[f64], b: &[f64]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn tangent(sys: &PolySystem<f64>, x: &[f64]) -> Option<[f64; 3]> {
    let (_, g1) = sys.polys()[0].evaluate_with_gradient(x).ok()?;
    let (_, g2) = sys.polys()[1].evaluate_with_gradient(x).ok()?;
    let t = cross(&g1, &g2);
    let r = dot(&t, &t).sqrt();
    (r > 1e-8).then(|| [t[0] / r, t[1] / r, t[2] / r])
}

struct PointHash {
    h: f64,
    cells: HashMap<[i64; 3], Vec<(usize, [f64; 3])>>,
}

impl PointHash {
    fn new(h: f64) -> Self {
        Self { h, cells: HashMap::new() }
    }
    fn key(&self, p: &[f64; 3]) -> [i64; 3] {
        [(p[0] / self.h).floor() as i64, (p[1] / self.h).floor() as i64, (p[2] / self.h).floor() as i64]
    }
    fn insert(&mut self, tag: usize, p: [f64; 3]) {
        let k = self.key(&p);
        self.cells.entry(k).or_default().push((tag, p));
    }
    /// Tag of some stored point within `r <= h` of `p`.
    fn near(&self, p: &[f64; 3], r: f64) -> Option<usize> {
        let k = self.key(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(v) = self.cells.get(&[k[0] + dx, k[1] + dy, k[2] + dz]) {
                        if let Some((t, _)) = v.iter().find(|(_, q)| dist(q, p) < r) {
                            return Some(*t);
                        }
                    }
                }
            }
        }
        None
    }
}

fn find_seeds(sys: &PolySystem<f64>, p: &Polynomial<f64>, spacing: f64) -> Vec<[f64; 3]> {
    let count = ((4.0 * std::f64::consts::PI / (spacing * spacing)).ceil() as usize).max(1000);
    let pts: Vec<[f64; 3]> = (0..count).map(|k| fibonacci_point(k, count)).collect();
    let vals: Vec<f64> = pts.iter().map(|q| p.eval(q)).collect();
    let reach = 2.5 * (4.0 * std::f64::consts::PI / count as f64).sqrt();
    let mut hash = PointHash::new(reach);
    for (i, q) in pts.iter().enumerate() {
        hash.insert(i, *q);
    }
    let opts = NewtonOptions::default();
    let mut seeds = Vec::new();
    for (i, q) in pts.iter().enumerate() {
        let k = hash.key(q);
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    let Some(cell) = hash.cells.get(&[k[0] + dx, k[1] + dy, k[2] + dz]) else { continue };
                    for &(j, r) in cell {
                        if j <= i || dist(q, &r) >= reach || vals[i].signum() == vals[j].signum() {
                            continue;
                        }
                        let m = [(q[0] + r[0]) / 2.0, (q[1] + r[1]) / 2.0, (q[2] + r[2]) / 2.0];
                        if let Some(x) = newton_project(sys, &m, &opts) {
                            seeds.push([x[0], x[1], x[2]]);
                        }
                    }
                }
            }
        }
        if vals[i] == 0.0 {
            seeds.push(*q);
        }
    }
    seeds
}

fn trace_one(sys: &PolySystem<f64>, x0: [f64; 3], h: f64, max_steps: usize) -> Result<(Vec<[f64; 3]>, bool), VarietyError> {
    let opts = NewtonOptions::default();
    let stall = |p: &[f64; 3], reason: &str| VarietyError::TraceStall { point: p.to_vec(), reason: reason.to_string() };
    let mut line = vec![x0];
    let mut x = x0;
    let mut prev_t = tangent(sys, &x).ok_or_else(|| stall(&x, "singular point: tangent vanishes"))?;
    let mut travelled = 0.0;
    for _ in 0..max_steps {
        let mut step = h;
        let next = loop {
            let y = [x[0] + step * prev_t[0], x[1] + step * prev_t[1], x[2] + step * prev_t[2]];
            if let Some(z) = newton_project(sys, &y, &opts) {
                let z = [z[0], z[1], z[2]];
                let d = dist(&z, &x);
                if d > 0.3 * step && d < 2.0 * step {
                    if let Some(t) = tangent(sys, &z) {
                        break (z, t);
                    }
                }
            }
            step /= 2.0;
            if step < h / 256.0 {
                return Err(stall(&x, "corrector diverged"));
            }
        };
        let (z, mut t) = next;
        if dot(&t, &prev_t) < 0.0 {
            t = [-t[0], -t[1], -t[2]];
        }
        travelled += dist(&z, &x);
        x = z;
        prev_t = t;
        if travelled > 4.0 * h && dist(&x, &x0) < 1.5 * h {
            if dist(&x, &x0) > 0.5 * h {
                line.push(x);
            }
            return Ok((line, true));
        }
        line.push(x);
    }
    Err(stall(&x, "step budget exhausted before the trace closed"))
}

/// Traces every component of `v = Z(P, P_sph)` found from a Fibonacci seed grid.
///
/// Traces coming within `merge_tol = 3·resolution` of an earlier component are
/// merged into it.
pub fn curve_components(v: &Variety, opts: &TraceOptions) -> Result<CurveComponents, VarietyError> {
    if v.nvars() != 3 || v.count() != 2 || v.dim() != 1 {
        return Err(VarietyError::InvalidArgument("expected a curve Z(P, P_sph) in R^3".into()));
    }
    let sys = v.generators().clone();
    let on_sphere = |p: &Polynomial<f64>| (0..16).all(|k| p.eval(&fibonacci_point(k, 16)).abs() < 1e-12);
    let p = match (on_sphere(&sys.polys()[0]), on_sphere(&sys.polys()[1])) {
        (_, true) => sys.polys()[0].clone(),
        (true, false) => sys.polys()[1].clone(),
        _ => return Err(VarietyError::InvalidArgument("neither generator vanishes on S^2".into())),
    };
    let h = opts.resolution;
    let merge_tol = 3.0 * h;
    let seeds = find_seeds(&sys, &p, opts.seed_spacing);
    let mut traced = PointHash::new(merge_tol);
    let mut components: Vec<Vec<[f64; 3]>> = Vec::new();
    let mut closed = Vec::new();
    for s in seeds {
        if traced.near(&s, merge_tol).is_some() {
            continue;
        }
        let (line, is_closed) = trace_one(&sys, s, h, opts.max_steps)?;
        let target = line.iter().find_map(|q| traced.near(q, merge_tol));
        let id = match target {
            Some(c) => {
                components[c].extend(line.iter().copied());
                closed[c] = closed[c] && is_closed;
                c
            }
            None => {
                components.push(line.clone());
                closed.push(is_closed);
                components.len() - 1
            }
        };
        for q in &line {
            traced.insert(id, *q);
        }
    }
    Ok(CurveComponents { components, closed, resolution: h, merge_tol, generators: sys })
}

#[derive(Clone, Debug, Default)]
pub struct CrossingReport {
    pub count: usize,
    /// Crossings whose sign pattern touches without changing (counted once each).
    pub tangencies: usize,
    /// Crossing locations refined by bisection to `|ξ·x − a| <= 1e-10`.
    pub points: Vec<Vec<f64>>,
}

const ZERO_TOL: f64 = 1e-10;

fn sign(v: f64) -> i8 {
    if v > ZERO_TOL {
        1
    } else if v < -ZERO_TOL {
        -1
    } else {
        0
    }
}

/// Sign changes of `x ↦ ξ·x − a` along all traced components.
pub fn plane_curve_crossings(cc: &CurveComponents, xi: &[f64], a: f64) -> usize {
    crossings_impl(cc, xi, a, false).count
}

/// As [`plane_curve_crossings`], also locating every crossing.
pub fn plane_crossing_points(cc: &CurveComponents, xi: &[f64], a: f64) -> CrossingReport {
    crossings_impl(cc, xi, a, true)
}

fn refine(sys: &PolySystem<f64>, xi: &[f64], a: f64, p: [f64; 3], q: [f64; 3]) -> Vec<f64> {
    let opts = NewtonOptions::default();
    let g = |x: &[f64]| dot(xi, x) - a;
    let (mut lo, mut hi) = (p.to_vec(), q.to_vec());
    let glo = g(&lo);
    for _ in 0..200 {
        let mid: Vec<f64> = lo.iter().zip(&hi).map(|(u, v)| 0.5 * (u + v)).collect();
        let mid = newton_project(sys, &mid, &opts).unwrap_or(mid);
        let gm = g(&mid);
        if gm.abs() <= ZERO_TOL {
            return mid;
        }
        if dist(&lo, &hi) < 1e-14 {
            return mid;
        }
        if gm.signum() == glo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

fn crossings_impl(cc: &CurveComponents, xi: &[f64], a: f64, locate: bool) -> CrossingReport {
    let mut rep = CrossingReport::default();
    for (comp, &is_closed) in cc.components.iter().zip(&cc.closed) {
        if comp.is_empty() {
            continue;
        }
        let s: Vec<i8> = comp.iter().map(|x| sign(dot(xi, x) - a)).collect();
        let Some(start) = s.iter().position(|&v| v != 0) else {
            rep.count += 1;
            rep.tangencies += 1;
            continue;
        };
        let len = s.len();
        let order: Vec<usize> =
            if is_closed { (0..=len).map(|k| (start + k) % len).collect() } else { (start..len).collect() };
        let mut last = order[0];
        let mut zero_run = false;
        for &k in &order[1..] {
            match s[k] {
                0 => zero_run = true,
                v => {
                    if v != s[last] {
                        rep.count += 1;
                        if locate {
                            rep.points.push(refine(&cc.generators, xi, a, comp[last], comp[k]));
                        }
                    } else if zero_run {
                        rep.count += 1;
                        rep.tangencies += 1;
                        if locate {
                            rep.points.push(comp[(last + 1) % len].to_vec());
                        }
                    }
                    zero_run = false;
                    last = k;
                }
            }
        }
    }
    rep
}
