use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use vardir_geonet::{Band, DirectionSet, Net};

use crate::error::PartitionError;

/// Outcome of the greedy good/bad split.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterSelection {
    /// Net indices of the extracted tops, in extraction order.
    pub omega_bad: Vec<usize>,
    /// Top ξ (net index) → item indices of its cluster.
    pub bad_clusters: BTreeMap<usize, Vec<usize>>,
    pub good_remainder: Vec<usize>,
    pub s: f64,
    pub threshold: usize,
}

impl ClusterSelection {
    /// Number of remaining items fully inside `R_{ξ,3s}` for every net point.
    pub fn remainder_band_counts(&self, items: &[Vec<Vec<f64>>], net: &Net) -> Result<Vec<usize>, PartitionError> {
        band_counts(items, &self.good_remainder, net, self.s)
    }
}

/// Each direction as a one-point item.
pub fn direction_items(v: &DirectionSet) -> Vec<Vec<Vec<f64>>> {
    v.points().iter().map(|p| vec![p.clone()]).collect()
}

fn inside(item: &[Vec<f64>], band: &Band) -> bool {
    !item.is_empty() && item.iter().all(|p| band.contains(p))
}

/// For every net point ξ, how many of `pool` lie entirely in `R_{ξ,3s}`.
pub fn band_counts(items: &[Vec<Vec<f64>>], pool: &[usize], net: &Net, s: f64) -> Result<Vec<usize>, PartitionError> {
    net.points()
        .iter()
        .map(|xi| {
            let band = Band::new(xi, 3.0 * s)?;
            Ok(pool.iter().filter(|&&i| inside(&items[i], &band)).count())
        })
        .collect()
}

/// Greedy extraction of bad clusters.
///
/// While some net point ξ has more than `threshold` remaining items entirely
/// inside `R_{ξ,3s}`, the ξ with the largest such count (lowest index on ties)
/// becomes a bad top and its items leave the pool. Items are cells given by
/// their member directions; a single direction is a one-point item.
pub fn cluster_select(items: &[Vec<Vec<f64>>], net: &Net, s: f64, threshold: usize) -> Result<ClusterSelection, PartitionError> {
    if threshold < 1 {
        return Err(PartitionError::InvalidArgument("threshold must be at least 1".into()));
    }
    if !(s > 0.0) {
        return Err(PartitionError::InvalidArgument(format!("band width must be positive, got {s}")));
    }
    let bands: Vec<Band> = net.points().iter().map(|xi| Band::new(xi, 3.0 * s)).collect::<Result<_, _>>()?;
    // membership is fixed, so it is computed once per (ξ, item)
    let members: Vec<Vec<usize>> =
        bands.iter().map(|b| (0..items.len()).filter(|&i| inside(&items[i], b)).collect()).collect();
    let mut alive = vec![true; items.len()];
    let mut omega_bad = Vec::new();
    let mut bad_clusters = BTreeMap::new();
    loop {
        let mut best: Option<(usize, usize)> = None;
        for (k, m) in members.iter().enumerate() {
            let c = m.iter().filter(|&&i| alive[i]).count();
            if c > threshold && best.is_none_or(|(_, bc)| c > bc) {
                best = Some((k, c));
            }
        }
        let Some((k, _)) = best else { break };
        let cluster: Vec<usize> = members[k].iter().copied().filter(|&i| alive[i]).collect();
        for &i in &cluster {
            alive[i] = false;
        }
        omega_bad.push(k);
        bad_clusters.insert(k, cluster);
    }
    let good_remainder = (0..items.len()).filter(|&i| alive[i]).collect();
    Ok(ClusterSelection { omega_bad, bad_clusters, good_remainder, s, threshold })
}
