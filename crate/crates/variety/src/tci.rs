use nalgebra::DMatrix;
use vardir_geonet::asym_dist;
use vardir_poly::{jacobian_matrix, jacobian_rank, rational_from_f64, Polynomial, PolySystem, Rational};

use crate::error::VarietyError;
use crate::newton::{newton_project, NewtonOptions};
use crate::region::Region;
use crate::sample::sample_variety;
use crate::variety::Variety;

/// Default minimum singular value for the transversality certificate.
pub const RANK_TOL: f64 = 1e-8;

const CERT_SAMPLES: usize = 64;

/// A sample `x` with residual `r` only certifies when `σ_min² ≥ BASIN_FACTOR · L · r`,
/// where `L` bounds the local variation of the Jacobian. Under that condition the
/// exact zero near `x`, at distance about `r / σ_min`, still has full rank.
const BASIN_FACTOR: f64 = 10.0;

/// Central-difference estimate of the Jacobian's Lipschitz constant near `x`.
fn jacobian_spread(sys: &PolySystem<f64>, x: &[f64]) -> f64 {
    let h = 1e-4;
    let mut worst = 0.0f64;
    for k in 0..x.len() {
        let mut a = x.to_vec();
        let mut b = x.to_vec();
        a[k] += h;
        b[k] -= h;
        let (Ok(ja), Ok(jb)) = (jacobian_matrix(sys, &a), jacobian_matrix(sys, &b)) else { return f64::INFINITY };
        worst = worst.max((ja - jb).norm() / (2.0 * h));
    }
    worst
}

/// A variety with `n − m` generators whose Jacobian has full rank at every
/// certificate point.
#[derive(Clone, Debug)]
pub struct Tci {
    variety: Variety,
    certificate: Vec<Vec<f64>>,
    rank_tol: f64,
}

#[derive(Clone, Debug)]
pub enum TciCheck {
    Certified { points: Vec<Vec<f64>> },
    Failed { witness: Vec<f64>, rank: usize, min_sv: f64 },
    /// No sample point was found, so nothing could be checked.
    Indeterminate { reason: String },
}

impl TciCheck {
    pub fn verdict(&self) -> Option<bool> {
        match self {
            TciCheck::Certified { .. } => Some(true),
            TciCheck::Failed { .. } => Some(false),
            TciCheck::Indeterminate { .. } => None,
        }
    }

    pub fn witness(&self) -> Option<&[f64]> {
        match self {
            TciCheck::Failed { witness, .. } => Some(witness),
            _ => None,
        }
    }
}

/// [`is_tci_in`] over the cube `[-2, 2]^n`.
pub fn is_tci(v: &Variety, sample_count: usize, tol: f64, seed: u64) -> Result<TciCheck, VarietyError> {
    is_tci_in(v, &Region::cube(v.nvars(), 2.0), sample_count, tol, seed)
}

pub fn is_tci_in(v: &Variety, region: &Region, sample_count: usize, tol: f64, seed: u64) -> Result<TciCheck, VarietyError> {
    if v.count() != v.codim() {
        return Err(VarietyError::InvalidArgument(format!(
            "a complete intersection of dimension {} in R^{} needs {} generators, found {}",
            v.dim(),
            v.nvars(),
            v.codim(),
            v.count()
        )));
    }
    let sample = sample_variety(v, region, sample_count, seed)?;
    if sample.points.is_empty() {
        return Ok(TciCheck::Indeterminate { reason: format!("no zero found after {} attempts", sample.attempts) });
    }
    let c = v.codim();
    for x in &sample.points {
        let info = jacobian_rank(v.generators(), x, tol)?;
        let residual = v.residual(x);
        let basin = info.min_sv * info.min_sv >= BASIN_FACTOR * jacobian_spread(v.generators(), x) * residual;
        if info.rank != c || info.min_sv < tol || !basin {
            return Ok(TciCheck::Failed { witness: x.clone(), rank: info.rank, min_sv: info.min_sv });
        }
    }
    Ok(TciCheck::Certified { points: sample.points })
}

impl Tci {
    pub fn certify(v: Variety, sample_count: usize, tol: f64, seed: u64) -> Result<Self, VarietyError> {
        let region = Region::cube(v.nvars(), 2.0);
        Self::certify_in(v, &region, sample_count, tol, seed)
    }

    pub fn certify_in(v: Variety, region: &Region, sample_count: usize, tol: f64, seed: u64) -> Result<Self, VarietyError> {
        match is_tci_in(&v, region, sample_count, tol, seed)? {
            TciCheck::Certified { points } => Ok(Self { variety: v, certificate: points, rank_tol: tol }),
            TciCheck::Failed { witness, .. } => Err(VarietyError::NotTci { witness }),
            TciCheck::Indeterminate { reason } => Err(VarietyError::Indeterminate(reason)),
        }
    }

    pub fn variety(&self) -> &Variety {
        &self.variety
    }

    pub fn certificate(&self) -> &[Vec<f64>] {
        &self.certificate
    }

    pub fn rank_tol(&self) -> f64 {
        self.rank_tol
    }

    pub fn dim(&self) -> usize {
        self.variety.dim()
    }

    pub fn degree(&self) -> u32 {
        self.variety.degree()
    }
}

/// A small change of generators that keeps a TCI close to the original zero set.
#[derive(Clone, Debug, PartialEq)]
pub enum Perturbation {
    /// `V_α = Z(P_1 + α_1, …, P_c + α_c)`.
    Shift(Vec<f64>),
    /// Replace generator `generator` by `P(x_1 + β_1 x_n, …, x_{n−1} + β_{n−1} x_n, x_n)`.
    Shear { generator: usize, beta: Vec<f64> },
}

fn exact(v: f64) -> Result<Rational, VarietyError> {
    rational_from_f64(v).ok_or_else(|| VarietyError::InvalidArgument(format!("non-finite parameter {v}")))
}

/// Perturbed exact generator list.
pub fn perturbed_system(sys: &PolySystem<Rational>, mode: &Perturbation) -> Result<PolySystem<Rational>, VarietyError> {
    let n = sys.nvars();
    let mut polys = sys.polys().to_vec();
    match mode {
        Perturbation::Shift(alpha) => {
            if alpha.len() != polys.len() {
                return Err(VarietyError::InvalidArgument(format!(
                    "{} shift parameters for {} generators",
                    alpha.len(),
                    polys.len()
                )));
            }
            for (p, a) in polys.iter_mut().zip(alpha) {
                *p = &*p + &Polynomial::constant(n, exact(*a)?);
            }
        }
        Perturbation::Shear { generator, beta } => {
            if beta.len() + 1 != n || *generator >= polys.len() {
                return Err(VarietyError::InvalidArgument("shear needs n−1 parameters and a valid generator".into()));
            }
            let xn = Polynomial::variable(n, n - 1);
            let mut subs = Vec::with_capacity(n);
            for (i, b) in beta.iter().enumerate() {
                subs.push(&Polynomial::variable(n, i) + &xn.scale(&exact(*b)?));
            }
            subs.push(xn);
            polys[*generator] = polys[*generator].compose(&subs)?;
        }
    }
    Ok(PolySystem::new(polys)?)
}

/// Largest absolute `c × c` minor of a `c × n` matrix.
pub(crate) fn max_minor(j: &DMatrix<f64>) -> f64 {
    let (c, n) = j.shape();
    let mut best = 0.0f64;
    for cols in combinations(n, c) {
        let sub = DMatrix::from_fn(c, c, |r, k| j[(r, cols[k])]);
        best = best.max(sub.determinant().abs());
    }
    best
}

pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Nearby points of the zero set of `target`, one per point of `u`.
///
/// Each is the Gauss–Newton projection of the point, or the nearest of `fallback`
/// when the projection fails.
pub fn project_or_nearest(target: &PolySystem<f64>, u: &[Vec<f64>], fallback: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let opts = NewtonOptions::default();
    u.iter()
        .map(|x| match newton_project(target, x, &opts) {
            Some(p) => p,
            None => vardir_geonet::nearest(x, fallback).map(|(i, _)| fallback[i].clone()).unwrap_or_else(|| vec![f64::INFINITY; x.len()]),
        })
        .collect()
}

/// Applies `mode`, re-certifies the result, and measures `dist(U_{ρ,R}, perturbed)`.
///
/// `U_{ρ,R}` is sampled as the points of `v` in the ball `|x| < R` at which some
/// maximal minor of the Jacobian has modulus at least `rho`.
pub fn perturb_tci(v: &Tci, mode: &Perturbation, rho: f64, r: f64) -> Result<(Tci, f64), VarietyError> {
    let sys = perturbed_system(v.variety().exact(), mode)?;
    let pv = Variety::new(sys, v.dim())?;
    let seed = 0x5eed_u64;
    let cert_region = Region::Ball(2.0 * r);
    let perturbed = Tci::certify_in(pv, &cert_region, CERT_SAMPLES, v.rank_tol(), seed)?;

    let base = sample_variety(v.variety(), &Region::Ball(r), 200, seed ^ 1)?;
    let mut u = Vec::with_capacity(base.points.len());
    for x in base.points {
        let j = jacobian_matrix(v.variety().generators(), &x)?;
        if max_minor(&j) >= rho {
            u.push(x);
        }
    }
    if u.is_empty() {
        return Err(VarietyError::Indeterminate(format!("U_rho,R is empty for rho = {rho}, R = {r}")));
    }
    let fallback = sample_variety(perturbed.variety(), &cert_region, 2000, seed ^ 2)?.points;
    let targets = project_or_nearest(perturbed.variety().generators(), &u, &fallback);
    let achieved = asym_dist(&u, &targets).map_err(|e| VarietyError::InvalidArgument(e.to_string()))?;
    Ok((perturbed, achieved))
}
