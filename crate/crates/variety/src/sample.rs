use rayon::prelude::*;
use vardir_geonet::sampling::rng;

use crate::error::VarietyError;
use crate::newton::{newton_project, NewtonOptions};
use crate::region::Region;
use crate::variety::Variety;

/// Residual bound every returned sample satisfies.
pub const SAMPLE_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct SampleOutcome {
    pub points: Vec<Vec<f64>>,
    /// `false` when the attempt budget ran out before `count` points were found.
    pub complete: bool,
    pub attempts: usize,
}

fn attempt(v: &Variety, region: &Region, seed: u64, i: u64, opts: &NewtonOptions) -> Option<Vec<f64>> {
    let mut r = rng(seed);
    r.set_stream(i);
    let x0 = region.seed_point(v.nvars(), &mut r);
    let x = newton_project(v.generators(), &x0, opts)?;
    (region.contains(&x) && v.residual(&x) <= SAMPLE_TOL).then_some(x)
}

/// Projects seeded ambient points of `region` onto the zero set.
///
/// Attempt `i` draws from ChaCha stream `i` of `seed`, and accepted points are
/// kept in attempt order, so the output does not depend on thread scheduling.
pub fn sample_variety(v: &Variety, region: &Region, count: usize, seed: u64) -> Result<SampleOutcome, VarietyError> {
    if count == 0 {
        return Err(VarietyError::InvalidArgument("sample count must be at least 1".into()));
    }
    let opts = NewtonOptions::default();
    let budget = 40 * count + 400;
    let batch = (2 * count).clamp(64, 4096);
    let mut points = Vec::with_capacity(count);
    let mut next = 0usize;
    while points.len() < count && next < budget {
        let hi = (next + batch).min(budget);
        let found: Vec<Option<Vec<f64>>> =
            (next..hi).into_par_iter().map(|i| attempt(v, region, seed, i as u64, &opts)).collect();
        for (k, p) in found.into_iter().enumerate() {
            if let Some(p) = p {
                if points.len() < count {
                    points.push(p);
                }
                if points.len() == count {
                    next += k + 1;
                    return Ok(SampleOutcome { points, complete: true, attempts: next });
                }
            }
        }
        next = hi;
    }
    let complete = points.len() == count;
    Ok(SampleOutcome { points, complete, attempts: next })
}
