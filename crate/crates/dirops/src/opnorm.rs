use std::collections::BTreeSet;
use std::f64::consts::TAU;

use rand::Rng;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;
use vardir_geonet::sampling::{gaussian, rng};
use vardir_geonet::{dot, DirectionSet};

use crate::cutoff::{annulus_cutoff, lp_table};
use crate::error::{DirOpError, Result};
use crate::grid::{GridFunction, GridShape};
use crate::nikodym::{nikodym_max_with_argmax, tube_average, TubeFamily};
use crate::psi::PsiProfile;
use crate::rough::{max_rough_with_argmax, rough_average};
use crate::smooth::{max_smooth_with_argmax, smooth_multiplier};

/// The maximal operators whose `L²` norms are estimated.
#[derive(Clone, Debug)]
pub enum OperatorSpec {
    /// `M_{V,r}`.
    Maximal { directions: DirectionSet, r: f64 },
    /// `A_{V,s}`.
    Smooth { directions: DirectionSet, s: f64, psi: PsiProfile },
    /// `A_{V,s} ∘ S_1`.
    SmoothCutoff { directions: DirectionSet, s: f64, psi: PsiProfile },
    /// `M_{Z,δ}`.
    Nikodym(TubeFamily),
}

impl OperatorSpec {
    pub fn directions(&self) -> &DirectionSet {
        match self {
            OperatorSpec::Maximal { directions, .. }
            | OperatorSpec::Smooth { directions, .. }
            | OperatorSpec::SmoothCutoff { directions, .. } => directions,
            OperatorSpec::Nikodym(t) => &t.directions,
        }
    }

    /// `√#V` times the norm of a single member, a crude union bound.
    pub fn union_ceiling(&self) -> f64 {
        let single = match self {
            OperatorSpec::Maximal { .. } | OperatorSpec::Nikodym(_) => 1.0,
            OperatorSpec::Smooth { psi, .. } | OperatorSpec::SmoothCutoff { psi, .. } => psi.sup(),
        };
        (self.directions().len() as f64).sqrt() * single
    }

    pub fn describe(&self) -> serde_json::Value {
        match self {
            OperatorSpec::Maximal { directions, r } => json!({"op": "M_V", "directions": directions.len(), "r": r}),
            OperatorSpec::Smooth { directions, s, psi } => {
                json!({"op": "A_V,s", "directions": directions.len(), "s": s, "sigma": psi.sigma, "amplitude": psi.amplitude})
            }
            OperatorSpec::SmoothCutoff { directions, s, psi } => {
                json!({"op": "A_V,s∘S_1", "directions": directions.len(), "s": s, "sigma": psi.sigma, "amplitude": psi.amplitude})
            }
            OperatorSpec::Nikodym(t) => json!({"op": "M_Z,delta", "directions": t.directions.len(), "delta": t.width, "length": t.length}),
        }
    }

    pub fn apply(&self, f: &GridFunction) -> Result<GridFunction> {
        Ok(self.linearize(f)?.0)
    }

    /// Output together with the maximizing direction and the sign of the
    /// maximizing member at every point.
    fn linearize(&self, f: &GridFunction) -> Result<(GridFunction, Vec<u32>)> {
        match self {
            OperatorSpec::Maximal { directions, r } => max_rough_with_argmax(f, directions, *r),
            OperatorSpec::Smooth { directions, s, psi } => max_smooth_with_argmax(f, directions, *s, psi),
            OperatorSpec::SmoothCutoff { directions, s, psi } => max_smooth_with_argmax(&annulus_cutoff(f)?, directions, *s, psi),
            OperatorSpec::Nikodym(t) => nikodym_max_with_argmax(f, t),
        }
    }

    fn member(&self, f: &GridFunction, k: usize) -> Result<GridFunction> {
        let v = &self.directions().points()[k];
        match self {
            OperatorSpec::Maximal { r, .. } => rough_average(f, v, *r),
            OperatorSpec::Smooth { s, psi, .. } => smooth_multiplier(f, v, *s, psi),
            OperatorSpec::SmoothCutoff { s, psi, .. } => smooth_multiplier(f, v, *s, psi)?.apply_multiplier(&lp_table(f.shape())),
            OperatorSpec::Nikodym(t) => tube_average(f, t, k),
        }
    }

    fn is_positive(&self) -> bool {
        matches!(self, OperatorSpec::Maximal { .. } | OperatorSpec::Nikodym(_))
    }

    /// One step `f ↦ T*T f` of the operator frozen at the current maximizers.
    ///
    /// The smooth members are self-adjoint. Segment and tube averages are
    /// symmetric in the continuum, so the member itself stands in for its
    /// adjoint; every iterate is re-scored through [`OperatorSpec::apply`], so
    /// the reported ratio stays a lower bound either way.
    fn power_step(&self, f: &GridFunction) -> Result<GridFunction> {
        let (tf, arg) = self.linearize(f)?;
        let tf_vals = tf.real_values().expect("maximal outputs are real");
        let used: BTreeSet<u32> = arg.iter().copied().collect();
        let mut acc = vec![0.0; f.len()];
        for k in used {
            let k = k as usize;
            let weight: Vec<f64> = if self.is_positive() {
                arg.iter().zip(tf_vals).map(|(&a, &t)| if a as usize == k { t } else { 0.0 }).collect()
            } else {
                let member = self.member(f, k)?;
                let m = member.real_values().expect("real input gives real output");
                arg.iter().zip(tf_vals).zip(m).map(|((&a, &t), &mv)| if a as usize == k { t * mv.signum() } else { 0.0 }).collect()
            };
            let g = GridFunction::from_real(f.shape().clone(), weight)?;
            let back = self.member(&g, k)?;
            for (a, b) in acc.iter_mut().zip(back.real_values().expect("real")) {
                *a += b;
            }
        }
        if self.is_positive() {
            acc.iter_mut().for_each(|x| *x = x.abs());
        }
        GridFunction::from_real(f.shape().clone(), acc)
    }
}

/// Centred shapes with positions given as fractions of the shortest box side,
/// and frequencies as grid indices, so that a family means the same functions
/// on any rescaled box.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestFamily {
    pub ball_radii: Vec<f64>,
    pub modulated: Vec<Modulation>,
    pub random: usize,
    /// Largest `|k|_∞` kept in band-limited members.
    pub band: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Modulation {
    pub radius: f64,
    pub frequency: Vec<i64>,
}

impl Default for TestFamily {
    fn default() -> Self {
        Self {
            ball_radii: vec![0.02, 0.05, 0.1, 0.2],
            modulated: vec![Modulation { radius: 0.1, frequency: vec![2, 1, 0] }, Modulation { radius: 0.2, frequency: vec![0, 3, 1] }],
            random: 3,
            band: 6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum TestDescriptor {
    Ball { radius: f64 },
    Modulated { radius: f64, frequency: Vec<i64> },
    Random { index: usize, band: usize },
    /// `iterations` alternating-maximization steps started from `start`.
    Refined { start: Box<TestDescriptor>, iterations: usize },
}

/// Keeps only the spectrum entries with `|k|_∞ ≤ band`.
fn low_pass(f: &GridFunction, band: usize) -> Result<GridFunction> {
    let shape = f.shape();
    let table: Vec<f64> = (0..shape.len())
        .map(|idx| {
            let inside = shape.unravel(idx).iter().zip(shape.sizes()).all(|(&i, &n)| GridShape::signed_index(i, n).unsigned_abs() as usize <= band);
            if inside {
                1.0
            } else {
                0.0
            }
        })
        .collect();
    f.apply_multiplier(&table)
}

fn check_band(shape: &GridShape, band: usize) -> Result<()> {
    if shape.sizes().iter().any(|&n| band >= n / 2) {
        return Err(DirOpError::InvalidArgument(format!("band {band} reaches the Nyquist index")));
    }
    Ok(())
}

fn ball(shape: &GridShape, radius: f64) -> GridFunction {
    let r = radius * shape.min_length();
    GridFunction::from_fn(shape.clone(), |x| if dot(x, x) <= r * r { 1.0 } else { 0.0 })
}

/// Real random trigonometric polynomial with Gaussian coefficients on `|k|_∞ ≤ band`.
pub fn random_band_limited(shape: &GridShape, band: usize, seed: u64) -> Result<GridFunction> {
    check_band(shape, band)?;
    let mut g = rng(seed);
    let inside = |idx: usize| shape.unravel(idx).iter().zip(shape.sizes()).all(|(&i, &n)| GridShape::signed_index(i, n).unsigned_abs() as usize <= band);
    let raw: Vec<Complex64> = (0..shape.len())
        .map(|idx| {
            let z = Complex64::new(gaussian(&mut g), gaussian(&mut g));
            if inside(idx) {
                z
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    let spec: Vec<Complex64> = (0..shape.len()).map(|i| 0.5 * (raw[i] + raw[shape.negated(i)].conj())).collect();
    GridFunction::from_spectrum(shape.clone(), spec, true)
}

impl TestFamily {
    pub fn members(&self, shape: &GridShape, seed: u64) -> Result<Vec<(TestDescriptor, GridFunction)>> {
        let mut out = Vec::new();
        for &r in &self.ball_radii {
            out.push((TestDescriptor::Ball { radius: r }, ball(shape, r)));
        }
        for m in &self.modulated {
            check_band(shape, self.band)?;
            let k: Vec<f64> = (0..shape.dim()).map(|a| m.frequency.get(a).copied().unwrap_or(0) as f64).collect();
            let xi: Vec<f64> = k.iter().zip(shape.lengths()).map(|(k, l)| TAU * k / l).collect();
            let smooth = low_pass(&ball(shape, m.radius), self.band)?;
            let wave = GridFunction::from_fn(shape.clone(), |x| dot(&xi, x).cos());
            let f = smooth.weighted(wave.real_values().expect("real"))?;
            out.push((TestDescriptor::Modulated { radius: m.radius, frequency: m.frequency.clone() }, f));
        }
        let mut g = rng(seed);
        for i in 0..self.random {
            let s: u64 = g.gen();
            out.push((TestDescriptor::Random { index: i, band: self.band }, random_band_limited(shape, self.band, s)?));
        }
        if out.is_empty() {
            return Err(DirOpError::InvalidArgument("test family is empty".into()));
        }
        Ok(out)
    }
}

/// Result of [`opnorm_lower`].
#[derive(Clone, Debug, Serialize)]
pub struct NormEstimate {
    /// `max ‖op f‖/‖f‖` over everything tried, a lower bound for the norm.
    pub estimate: f64,
    pub descriptor: TestDescriptor,
    /// Ratio of every family member before refinement.
    pub candidates: Vec<(TestDescriptor, f64)>,
    /// Ratio after each alternating-maximization step.
    pub refinements: Vec<f64>,
    pub seed: u64,
}

impl NormEstimate {
    /// Reproducibility record: seed, grid, operator (with `σ`), and family.
    pub fn sidecar(&self, op: &OperatorSpec, shape: &GridShape, family: &TestFamily) -> serde_json::Value {
        json!({
            "seed": self.seed,
            "grid": {"sizes": shape.sizes(), "lengths": shape.lengths()},
            "operator": op.describe(),
            "family": family,
            "estimate": self.estimate,
            "descriptor": self.descriptor,
            "candidates": self.candidates,
            "refinements": self.refinements,
        })
    }
}

fn ratio(op: &OperatorSpec, f: &GridFunction) -> Result<f64> {
    let n = f.norm_l2();
    if n == 0.0 {
        return Ok(0.0);
    }
    Ok(op.apply(f)?.norm_l2() / n)
}

/// Lower bound for `‖op‖_{L²→L²}` on the grid of `shape`.
///
/// Every member of `family` is scored; the best one is then refined by
/// alternating maximization: freeze the maximizing direction at each point,
/// take a power-iteration step of the resulting linear operator, re-select.
pub fn opnorm_lower(op: &OperatorSpec, shape: &GridShape, family: &TestFamily, iters: usize, seed: u64) -> Result<NormEstimate> {
    if iters == 0 {
        return Err(DirOpError::InvalidArgument("at least one refinement iteration is needed".into()));
    }
    if op.directions().dim() != shape.dim() {
        return Err(DirOpError::InvalidArgument("operator and grid differ in dimension".into()));
    }
    let members = family.members(shape, seed)?;
    let mut candidates = Vec::with_capacity(members.len());
    let mut best: Option<(usize, f64)> = None;
    for (i, (d, f)) in members.iter().enumerate() {
        let q = ratio(op, f)?;
        candidates.push((d.clone(), q));
        if best.map_or(true, |(_, b)| q > b) {
            best = Some((i, q));
        }
    }
    let (start, mut estimate) = best.expect("family is non-empty");
    let mut descriptor = members[start].0.clone();
    let mut f = members[start].1.clone();
    let mut refinements = Vec::with_capacity(iters);
    for it in 1..=iters {
        let g = op.power_step(&f)?;
        let n = g.norm_l2();
        if !(n > 0.0) {
            break;
        }
        f = g.scaled(1.0 / n);
        let q = ratio(op, &f)?;
        refinements.push(q);
        if q > estimate {
            estimate = q;
            descriptor = TestDescriptor::Refined { start: Box::new(members[start].0.clone()), iterations: it };
        }
    }
    Ok(NormEstimate { estimate, descriptor, candidates, refinements, seed })
}
