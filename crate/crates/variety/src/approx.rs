use rand::seq::SliceRandom;
use rand::Rng;
use vardir_geonet::{dist, sampling::rng};
use vardir_poly::{jacobian_rank, rational_from_f64, Polynomial, PolySystem, Rational};

use crate::error::VarietyError;
use crate::newton::{newton_project, NewtonOptions};
use crate::region::Region;
use crate::sample::sample_variety;
use crate::tci::{combinations, Tci, RANK_TOL};
use crate::variety::Variety;

pub const ALPHA_GRID_MIN: f64 = 1e-6;
pub const ALPHA_GRID_MAX: f64 = 1e-2;
const ALPHA_GRID_LEN: usize = 33;
const CERT_SAMPLES: usize = 48;
const AUDIT_SAMPLES: usize = 200;
const LOCUS_SAMPLES: usize = 40;
const ROUNDS: usize = 6;

/// Output of [`tci_approximation`].
#[derive(Clone, Debug)]
pub struct TciApproximation {
    /// Finite part: sampled points of zero-dimensional singular strata.
    pub z0: Vec<Vec<f64>>,
    /// `(μ, TCIs of dimension μ)`, highest dimension first.
    pub families: Vec<(usize, Vec<Tci>)>,
    /// `sup_{u ∈ U} dist(u, Z_0 ∪ families)` over sampled `U = v ∩ A_n(R)`.
    pub audit: f64,
    /// Shift magnitudes applied, one per constructed TCI that was perturbed.
    pub alphas: Vec<f64>,
}

fn log_grid() -> Vec<f64> {
    let (a, b) = (ALPHA_GRID_MIN.log10(), ALPHA_GRID_MAX.log10());
    (0..ALPHA_GRID_LEN).map(|k| 10f64.powf(a + (b - a) * k as f64 / (ALPHA_GRID_LEN - 1) as f64)).collect()
}

fn det(m: &[Vec<Polynomial<Rational>>]) -> Polynomial<Rational> {
    let k = m.len();
    let n = m[0][0].nvars();
    match k {
        1 => m[0][0].clone(),
        _ => {
            let mut acc = Polynomial::zero(n);
            for col in 0..k {
                if m[0][col].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<Polynomial<Rational>>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|(j, _)| *j != col).map(|(_, p)| p.clone()).collect())
                    .collect();
                let term = &m[0][col] * &det(&minor);
                acc = if col % 2 == 0 { &acc + &term } else { &acc - &term };
            }
            acc
        }
    }
}

/// All `c × c` Jacobian minors `Δ_τ P_σ` over generator subsets `σ` of size `c = n − m`.
fn jacobian_minors(sys: &PolySystem<Rational>, c: usize) -> Vec<Polynomial<Rational>> {
    let n = sys.nvars();
    let grads: Vec<Vec<Polynomial<Rational>>> = sys.polys().iter().map(|p| p.gradient()).collect();
    let mut out = Vec::new();
    for sigma in combinations(sys.len(), c) {
        for tau in combinations(n, c) {
            let m: Vec<Vec<Polynomial<Rational>>> =
                sigma.iter().map(|&g| tau.iter().map(|&v| grads[g][v].clone()).collect()).collect();
            let d = det(&m);
            if !d.is_zero() && !out.contains(&d) {
                out.push(d);
            }
        }
    }
    out
}

/// `Z ∩ Z({Δ_τ P_σ})`: the points where no `n − m` generators are transverse.
pub fn singular_locus(v: &Variety) -> Result<Variety, VarietyError> {
    let mut polys = v.exact().polys().to_vec();
    polys.extend(jacobian_minors(v.exact(), v.codim()));
    let dim = v.dim().saturating_sub(1);
    Variety::new(PolySystem::new(polys)?, dim)
}

fn estimate_dim(v: &Variety, pts: &[Vec<f64>], cap: usize) -> usize {
    let n = v.nvars();
    let max_rank = pts
        .iter()
        .filter_map(|x| jacobian_rank(v.generators(), x, 1e-6).ok())
        .map(|r| r.rank)
        .max()
        .unwrap_or(n);
    n.saturating_sub(max_rank).min(cap)
}

fn dedupe(pts: Vec<Vec<f64>>, tol: f64) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for p in pts {
        if out.iter().all(|q| dist(q, &p) > tol) {
            out.push(p);
        }
    }
    out
}

struct Builder {
    r: f64,
    families: Vec<(usize, Vec<Tci>)>,
    z0: Vec<Vec<f64>>,
    alphas: Vec<f64>,
}

impl Builder {
    fn push(&mut self, dim: usize, t: Tci) {
        match self.families.iter_mut().find(|(d, _)| *d == dim) {
            Some((_, list)) => list.push(t),
            None => {
                self.families.push((dim, vec![t]));
                self.families.sort_by(|a, b| b.0.cmp(&a.0));
            }
        }
    }

    fn region(&self) -> Region {
        Region::Ball(2.0 * self.r + 1.0)
    }

    fn level(&mut self, v: &Variety, alpha_cap: f64, seed: u64, depth: usize) -> Result<(), VarietyError> {
        let region = self.region();
        if v.dim() == 0 {
            let s = sample_variety(v, &region, LOCUS_SAMPLES, seed)?;
            self.z0.extend(dedupe(s.points, 1e-7));
            return Ok(());
        }
        let c = v.codim();
        // Sample-based certification cannot see isolated singular points, so the
        // singular stratum is located first and a TCI is only accepted without it.
        let sing = singular_locus(v)?;
        let sing_pts = sample_variety(&sing, &region, LOCUS_SAMPLES, seed ^ 0xa11)?.points;
        if v.count() == c && sing_pts.is_empty() {
            if let Ok(t) = Tci::certify_in(v.clone(), &region, CERT_SAMPLES, RANK_TOL, seed) {
                self.push(v.dim(), t);
                return Ok(());
            }
        }
        if depth < 4 && !sing_pts.is_empty() {
            let d = estimate_dim(&sing, &sing_pts, v.dim() - 1);
            let sing = Variety::new(sing.exact().clone(), d)?;
            self.level(&sing, alpha_cap / 2.0, seed.wrapping_add(17), depth + 1)?;
        }
        // regular part: generic shifts of every c-subset of generators
        let mut grid: Vec<f64> = log_grid().into_iter().filter(|a| *a <= alpha_cap).collect();
        if grid.is_empty() {
            grid.push(ALPHA_GRID_MIN.min(alpha_cap));
        }
        let mut r = rng(seed ^ 0xa1fa);
        grid.shuffle(&mut r);
        for sigma in combinations(v.count(), c) {
            let dirs: Vec<f64> = (0..c).map(|_| r.gen_range(0.5..1.0)).collect();
            for sign in [1.0, -1.0] {
                for &a in &grid {
                    let mut polys = Vec::with_capacity(c);
                    for (k, &g) in sigma.iter().enumerate() {
                        let shift = rational_from_f64(sign * a * dirs[k]).expect("finite shift");
                        polys.push(&v.exact().polys()[g] + &Polynomial::constant(v.nvars(), shift));
                    }
                    let cand = Variety::new(PolySystem::new(polys)?, v.dim())?;
                    if let Ok(t) = Tci::certify_in(cand, &region, CERT_SAMPLES, RANK_TOL, seed ^ a.to_bits()) {
                        self.alphas.push(a);
                        self.push(v.dim(), t);
                        break;
                    }
                }
            }
        }
        Ok(())
    }
}

fn audit(u: &[Vec<f64>], z0: &[Vec<f64>], families: &[(usize, Vec<Tci>)]) -> f64 {
    let opts = NewtonOptions::default();
    u.iter()
        .map(|x| {
            let mut best = z0.iter().map(|z| dist(x, z)).fold(f64::INFINITY, f64::min);
            for (_, list) in families {
                for t in list {
                    if let Some(p) = newton_project(t.variety().generators(), x, &opts) {
                        best = best.min(dist(x, &p));
                    }
                }
            }
            best
        })
        .fold(0.0, f64::max)
}

/// Approximates `v ∩ A_n(R)` within `epsilon` by a finite set plus TCIs of
/// dimensions `1..=m`.
///
/// The singular stratum (common zeros of all maximal Jacobian minors) is
/// treated recursively one dimension lower; the regular part is covered by
/// generic shifts `Z(P_σ + α)` of every generator subset `σ`, with `α` drawn
/// from a seeded log-uniform grid and accepted once it certifies as a TCI.
/// Failed audits are retried with a smaller shift cap.
pub fn tci_approximation(v: &Variety, epsilon: f64, r: f64, seed: u64) -> Result<TciApproximation, VarietyError> {
    if !(epsilon > 0.0) {
        return Err(VarietyError::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
    }
    if !(r >= 1.0) {
        return Err(VarietyError::InvalidArgument(format!("R must be at least 1, got {r}")));
    }
    let u = sample_variety(v, &Region::Annulus(r), AUDIT_SAMPLES, seed)?.points;
    if u.is_empty() {
        return Ok(TciApproximation { z0: Vec::new(), families: Vec::new(), audit: 0.0, alphas: Vec::new() });
    }
    let mut best = f64::INFINITY;
    let mut cap = (epsilon / 4.0).min(ALPHA_GRID_MAX);
    for round in 0..ROUNDS {
        let mut b = Builder { r, families: Vec::new(), z0: Vec::new(), alphas: Vec::new() };
        b.level(v, cap, seed.wrapping_add(round as u64 * 7919), 0)?;
        let a = audit(&u, &b.z0, &b.families);
        if a < epsilon {
            return Ok(TciApproximation { z0: b.z0, families: b.families, audit: a, alphas: b.alphas });
        }
        best = best.min(a);
        cap /= 10.0;
    }
    Err(VarietyError::AuditFailed { best, epsilon })
}
