//! Step plans for every scenario.

mod growth;
mod partition;
mod projection;
mod recursion;

use vardir_dirops::{growth_fit, GrowthFit};
use vardir_geonet::sampling::{fibonacci_sphere, random_rotation3, rng, rotate3};
use vardir_geonet::DirectionSet;
use vardir_poly::{ratio, Polynomial, PolySystem, Rational};
use vardir_variety::{Tci, Variety};

pub use growth::{equispaced_on_curve, synthetic_series};
pub use partition::{audit_partition, AuditCounts};

use crate::config::{Params, ScenarioConfig};
use crate::dag::{Plan, StepError, StepOutput};

/// `x² + y² + z² − 1`.
pub fn sphere_poly() -> Polynomial<Rational> {
    let v = |i| Polynomial::<Rational>::variable(3, i);
    &(&(&(&v(0) * &v(0)) + &(&v(1) * &v(1))) + &(&v(2) * &v(2))) - &Polynomial::constant(3, ratio(1, 1))
}

/// The unit sphere as a certified two-dimensional TCI.
pub fn sphere_tci() -> Result<Tci, StepError> {
    let v = Variety::new(PolySystem::new(vec![sphere_poly()])?, 2)?;
    Ok(Tci::certify(v, 48, 1e-8, 1)?)
}

/// `count` Fibonacci points on `S²` under a seeded random rotation.
pub fn rotated_fibonacci(count: usize, seed: u64) -> Result<DirectionSet, StepError> {
    let rot = random_rotation3(&mut rng(seed));
    let pts = fibonacci_sphere(count).into_iter().map(|p| rotate3(&rot, [p[0], p[1], p[2]]).to_vec()).collect();
    Ok(DirectionSet::new(3, pts, true)?)
}

/// Fits `series`, records the fit and writes it as `fit-<name>.csv`.
fn record_fit(out: &mut StepOutput, name: &str, series: &[(f64, f64)]) -> Result<GrowthFit, StepError> {
    let fit = growth_fit(series)?;
    out.measure("slope", fit.slope);
    out.measure("intercept", fit.intercept);
    out.measure("residual", fit.residual);
    out.measure("max_residual", fit.max_residual);
    out.measure("series", &fit.series);
    let mut buf = Vec::new();
    fit.write_csv(&mut buf)?;
    out.file(format!("fit-{name}.csv"), buf);
    Ok(fit)
}

pub fn plan(cfg: &ScenarioConfig) -> Plan {
    let seed = cfg.seed;
    match &cfg.params {
        Params::PartitionAudit(p) => partition::plan(p, seed),
        Params::SphereGrowth(p) => growth::sphere_plan(p, seed),
        Params::CurveGrowth(p) => growth::curve_plan(p, seed),
        Params::Nikodym(p) => growth::nikodym_plan(p, seed),
        Params::GrowthFit(p) => growth::fit_plan(p),
        Params::RecursionAudit(p) => recursion::plan(p, seed),
        Params::ProjectionDemo(p) => projection::plan(p, seed),
    }
}
