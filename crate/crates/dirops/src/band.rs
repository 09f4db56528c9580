use serde::{Deserialize, Serialize};
use vardir_geonet::dot;

use crate::error::{DirOpError, Result};
use crate::grid::{multiplier_table, AliasRule, GridFunction};

/// Open interval `(lo, hi)`; either end may be infinite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo >= hi {
            return Err(DirOpError::InvalidArgument(format!("empty interval ({lo}, {hi})")));
        }
        Ok(Self { lo, hi })
    }

    pub fn all() -> Self {
        Self { lo: f64::NEG_INFINITY, hi: f64::INFINITY }
    }

    pub fn contains(&self, t: f64) -> bool {
        self.lo < t && t < self.hi
    }
}

/// `B_{v,I} f`: the spectrum restricted to `{β : β·v ∈ I}`.
pub fn band_operator(f: &GridFunction, v: &[f64], interval: Interval) -> Result<GridFunction> {
    if v.len() != f.dim() {
        return Err(DirOpError::InvalidArgument(format!("direction of length {} on a {}-dimensional grid", v.len(), f.dim())));
    }
    let table = multiplier_table(f.shape(), AliasRule::Min, |xi| if interval.contains(dot(xi, v)) { 1.0 } else { 0.0 });
    f.apply_multiplier(&table)
}
