use std::collections::BTreeSet;

use vardir_dirops::{overlap_audit, random_band_limited, FreqRegion, GridShape};
use vardir_geonet::{build_net, Band, DirectionSet, Manifold};
use vardir_partition::{cluster_select, direction_items, DirectionPartition};
use vardir_variety::Tci;

use super::partition::{crossing_step, partition_step};
use super::sphere_tci;
use crate::config::RecursionAuditParams;
use crate::dag::{input, Plan, StepError, StepOutput};

/// Whether every item index occurs exactly once among the bad clusters and
/// the good remainder.
fn exact_cover(total: usize, groups: &[&[usize]]) -> bool {
    let mut seen = vec![0usize; total];
    for g in groups {
        for &i in *g {
            match seen.get_mut(i) {
                Some(k) => *k += 1,
                None => return false,
            }
        }
    }
    seen.iter().all(|&k| k == 1)
}

#[derive(Clone, Copy)]
enum ItemKind {
    Cells,
    Directions,
}

impl ItemKind {
    fn name(self) -> &'static str {
        match self {
            ItemKind::Cells => "cells",
            ItemKind::Directions => "directions",
        }
    }
}

/// Greedy bad-cluster extraction with an exact audit of its output.
fn cluster_step(items: &[Vec<Vec<f64>>], q: &RecursionAuditParams, seed: u64) -> Result<StepOutput, StepError> {
    let net = build_net(&Manifold::Sphere { n: 3 }, q.top_spacing, seed)?;
    let sel = cluster_select(items, &net, q.band, q.cluster_threshold)?;
    let counts = sel.remainder_band_counts(items, &net)?;
    let residual_max = counts.iter().copied().max().unwrap_or(0);
    let mut groups: Vec<&[usize]> = sel.bad_clusters.values().map(|c| c.as_slice()).collect();
    groups.push(&sel.good_remainder);
    let disjoint = {
        let mut all = BTreeSet::new();
        sel.bad_clusters.values().flatten().all(|&i| all.insert(i))
    };
    let mut inside = true;
    for (&top, members) in &sel.bad_clusters {
        let band = Band::new(&net.points()[top], 3.0 * q.band)?;
        inside &= members.len() > q.cluster_threshold && members.iter().all(|&i| items[i].iter().all(|x| band.contains(x)));
    }
    let mut out = StepOutput::new();
    out.measure("items", items.len());
    out.measure("tops", net.len());
    out.measure("bad_tops", &sel.omega_bad);
    out.measure("bad_sizes", sel.bad_clusters.values().map(|c| c.len()).collect::<Vec<_>>());
    out.measure("remainder", sel.good_remainder.len());
    out.measure("remainder_max", residual_max);
    out.check("remainder-counts", residual_max <= q.cluster_threshold, format!("largest remaining band count {residual_max} against {}", q.cluster_threshold));
    out.check("bad-clusters-disjoint", disjoint, "");
    out.check("exact-cover", exact_cover(items.len(), &groups), "");
    out.check("bad-clusters-in-band", inside, "");
    Ok(out)
}

pub(super) fn plan(p: &RecursionAuditParams, seed: u64) -> Plan {
    let mut plan = Plan::new();
    let p = p.clone();
    let tag = format!("N{}-E{}-seed{seed}", p.n, p.e);
    let z = plan.add("sphere", &[], |_| Ok(StepOutput::new().with_artifact(sphere_tci()?)));
    let (n, e, delta) = (p.n, p.e, p.delta);
    let part = plan.add(format!("partition {tag}"), &[z], move |inp| partition_step(input::<Tci>(inp, 0)?, n, e, delta, 20_000, seed));
    let (planes, offset, budget) = (p.planes, 3.0 * p.band, (p.budget_factor * p.e) as usize);
    let t = tag.clone();
    let cross = plan.add(format!("crossings {tag}"), &[z, part], move |inp| crossing_step(inp, planes, offset, budget, seed, &t));

    let q = p.clone();
    plan.add("cell orthogonality", &[part, cross], move |inp| {
        let (dp, v) = input::<(DirectionPartition, DirectionSet)>(inp, 0)?;
        let &(_, crossing_max) = input::<(u32, usize)>(inp, 1)?;
        let regions: Vec<FreqRegion> = dp
            .cells
            .iter()
            .map(|c| FreqRegion::Union(c.members.iter().map(|&i| FreqRegion::Band { xi: v.points()[i].clone(), s: q.band }).collect()))
            .collect();
        let shape = GridShape::cube(3, q.grid_size, q.box_len)?;
        let mut out = StepOutput::new();
        let mut overlap = 0;
        let mut worst_share = 0.0f64;
        let mut holds = true;
        for k in 0..q.fields as u64 {
            let f = random_band_limited(&shape, q.field_band, seed + k)?;
            let a = overlap_audit(&f, &regions)?;
            holds &= a.holds();
            overlap = overlap.max(a.max_overlap);
            worst_share = worst_share.max(a.restricted_energy / a.energy);
        }
        out.measure("cells", regions.len());
        out.measure("max_overlap", overlap);
        out.measure("max_energy_share", worst_share);
        out.measure("crossing_max", crossing_max);
        out.measure("overlap_over_crossing", overlap as f64 / crossing_max.max(1) as f64);
        out.check("cell-orthogonality", holds, format!("Σ‖f_R_C‖² / ‖f‖² reached {worst_share:.4} against overlap {overlap}"));
        out.check("overlap-budget", overlap <= budget, format!("overlap {overlap} against {budget}"));
        Ok(out)
    });

    for kind in [ItemKind::Cells, ItemKind::Directions] {
        let q = p.clone();
        plan.add(format!("cluster selection {}", kind.name()), &[part], move |inp| {
            let (dp, v) = input::<(DirectionPartition, DirectionSet)>(inp, 0)?;
            let items = match kind {
                ItemKind::Cells => dp.cells.iter().map(|c| c.members.iter().map(|&i| v.points()[i].clone()).collect()).collect(),
                ItemKind::Directions => direction_items(v),
            };
            cluster_step(&items, &q, seed)
        });
    }
    plan
}
