use vardir_geonet::DirectionSet;
use vardir_partition::{crossing_audit, direction_partition, write_crossing_csv, DirectionOptions, DirectionPartition};
use vardir_poly::jacobian_rank;
use vardir_variety::{newton_project, NewtonOptions, Tci};

use super::{rotated_fibonacci, sphere_tci};
use crate::config::PartitionAuditParams;
use crate::dag::{input, Plan, StepError, StepOutput};

/// Violations found by the four partition audits.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct AuditCounts {
    /// Directions not seen exactly once among the cells and `V_×`.
    pub conservation: usize,
    /// Cells above `ceil((N/E)^m)`.
    pub oversize: usize,
    /// `V_×` members with no wall point within `δ`.
    pub far: usize,
    /// Certificate points where a wall's Jacobian loses rank.
    pub rank: usize,
}

impl AuditCounts {
    pub fn total(&self) -> usize {
        self.conservation + self.oversize + self.far + self.rank
    }
}

/// Conservation, cell size, wall proximity (witnessed by a Gauss–Newton wall
/// point) and wall rank at every certificate point.
pub fn audit_partition(dp: &DirectionPartition, v: &DirectionSet) -> AuditCounts {
    let mut seen = vec![0u32; v.len()];
    let mut a = AuditCounts::default();
    for c in &dp.cells {
        a.oversize += usize::from(c.members.len() > dp.cell_bound());
        for &i in &c.members {
            seen[i] += 1;
        }
    }
    for w in &dp.v_times {
        seen[w.index] += 1;
        let x = &v.points()[w.index];
        let Some(wall) = dp.walls.get(w.wall) else {
            a.far += 1;
            continue;
        };
        let gens = wall.tci.variety().generators();
        let near = newton_project(gens, x, &NewtonOptions::default()).is_some_and(|p| {
            let residual = gens.polys().iter().map(|q| q.eval(&p).abs()).fold(0.0, f64::max);
            let d = p.iter().zip(x).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            residual < 1e-9 && d < dp.delta
        });
        a.far += usize::from(!near);
    }
    a.conservation = seen.iter().filter(|&&k| k != 1).count() + usize::from(dp.accounted() != v.len());
    for w in &dp.walls {
        let (gens, count) = (w.tci.variety().generators(), w.tci.variety().count());
        for x in w.tci.certificate() {
            a.rank += usize::from(jacobian_rank(gens, x, w.tci.rank_tol()).map_or(true, |r| r.rank != count));
        }
    }
    a
}

pub(super) fn partition_step(z: &Tci, n: u32, e: u32, delta: f64, dense: usize, seed: u64) -> Result<StepOutput, StepError> {
    let v = rotated_fibonacci((n * n) as usize, seed)?;
    let opts = DirectionOptions { dense_samples: dense, ..DirectionOptions::default() };
    let dp = direction_partition(z, &v, n, e, delta, seed, &opts)?;
    let a = audit_partition(&dp, &v);
    let mut out = StepOutput::new();
    out.measure("directions", v.len());
    out.measure("cells", dp.cells.len());
    out.measure("near_wall", dp.v_times.len());
    out.measure("walls", dp.walls.len());
    out.measure("cell_bound", dp.cell_bound());
    out.measure("max_cell_size", dp.max_cell_size());
    out.measure("max_wall_distance", dp.max_wall_distance());
    out.measure("max_wall_degree", dp.max_wall_degree());
    out.measure("refinement_level", dp.level);
    out.measure("flags", &dp.flags);
    out.check("conservation", a.conservation == 0, format!("{} of {} directions not seen exactly once", a.conservation, v.len()));
    out.check("cell-size", a.oversize == 0, format!("largest cell {} against {}", dp.max_cell_size(), dp.cell_bound()));
    out.check("wall-proximity", a.far == 0, format!("{} of {} set-aside directions without a wall point within {}", a.far, dp.v_times.len(), dp.delta));
    out.check("wall-rank", a.rank == 0, format!("{} rank deficient certificate points", a.rank));
    out.file(format!("partition-N{n}-E{e}-seed{seed}.json"), serde_json::to_vec_pretty(&dp.to_record())?);
    Ok(out.with_artifact((dp, v)))
}

/// Expects `(Tci, (DirectionPartition, DirectionSet))` as inputs; hands on
/// `(E, max count)`.
pub(super) fn crossing_step(
    inputs: &[crate::dag::Artifact],
    planes: usize,
    offset: f64,
    budget: usize,
    seed: u64,
    tag: &str,
) -> Result<StepOutput, StepError> {
    let z = input::<Tci>(inputs, 0)?;
    let (dp, v) = input::<(DirectionPartition, DirectionSet)>(inputs, 1)?;
    let rows = crossing_audit(dp, z, v, planes, offset, seed)?;
    let max = rows.iter().map(|r| r.count).max().unwrap_or(0);
    let mean = rows.iter().map(|r| r.count as f64).sum::<f64>() / rows.len().max(1) as f64;
    let mut out = StepOutput::new();
    out.measure("planes", rows.len());
    out.measure("offset", offset);
    out.measure("max_count", max);
    out.measure("mean_count", mean);
    out.measure("budget", budget);
    out.measure("implied_constant", max as f64 / dp.e as f64);
    out.measure("nudged", rows.iter().filter(|r| r.nudged).count());
    out.check("crossing-budget", max <= budget, format!("max {max} against {budget}"));
    let mut buf = Vec::new();
    write_crossing_csv(&rows, &mut buf)?;
    out.file(format!("crossings-{tag}.csv"), buf);
    let e = dp.e;
    Ok(out.with_artifact((e, max)))
}

pub(super) fn plan(p: &PartitionAuditParams, seed: u64) -> Plan {
    let mut plan = Plan::new();
    let z = plan.add("sphere", &[], |_| Ok(StepOutput::new().with_artifact(sphere_tci()?)));
    let mut crossings = Vec::new();
    for &n in &p.n_values {
        for &e in &p.e_values {
            for k in 0..p.seeds as u64 {
                let s = seed + k;
                let tag = format!("N{n}-E{e}-seed{s}");
                let (delta, dense) = (p.delta, p.dense_samples);
                let part = plan.add(format!("partition {tag}"), &[z], move |inp| partition_step(input::<Tci>(inp, 0)?, n, e, delta, dense, s));
                let (planes, offset, budget) = (p.planes, p.offset * p.band, (p.budget_factor * e) as usize);
                let t = tag.clone();
                crossings.push(plan.add(format!("crossings {tag}"), &[z, part], move |inp| crossing_step(inp, planes, offset, budget, s, &t)));
            }
        }
    }
    plan.add("crossing summary", &crossings, |inp| {
        let mut worst = 0usize;
        let mut constant = 0.0f64;
        for k in 0..inp.len() {
            let &(e, max) = input::<(u32, usize)>(inp, k)?;
            worst = worst.max(max);
            constant = constant.max(max as f64 / e as f64);
        }
        let mut out = StepOutput::new();
        out.measure("max_count", worst);
        out.measure("max_implied_constant", constant);
        out.measure("partitions", inp.len());
        Ok(out)
    });
    plan
}
