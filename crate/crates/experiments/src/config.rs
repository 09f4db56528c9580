//! Scenario configuration: JSON in, validated before anything runs.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use vardir_poly::{parse_polynomial, Polynomial, Rational};

use crate::error::{schema, ExperimentError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioName {
    PartitionAudit,
    SphereGrowth,
    CurveGrowth,
    Nikodym,
    RecursionAudit,
    ProjectionDemo,
    GrowthFit,
}

impl ScenarioName {
    pub const ALL: [ScenarioName; 7] = [
        ScenarioName::PartitionAudit,
        ScenarioName::SphereGrowth,
        ScenarioName::CurveGrowth,
        ScenarioName::Nikodym,
        ScenarioName::RecursionAudit,
        ScenarioName::ProjectionDemo,
        ScenarioName::GrowthFit,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioName::PartitionAudit => "partition-audit",
            ScenarioName::SphereGrowth => "sphere-growth",
            ScenarioName::CurveGrowth => "curve-growth",
            ScenarioName::Nikodym => "nikodym",
            ScenarioName::RecursionAudit => "recursion-audit",
            ScenarioName::ProjectionDemo => "projection-demo",
            ScenarioName::GrowthFit => "growth-fit",
        }
    }
}

impl fmt::Display for ScenarioName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScenarioName {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| ExperimentError::Schema(format!("unknown scenario `{s}`")))
    }
}

/// A polynomial given as term lines `num/den e1 ... en`, one string per term.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PolySpec(pub Vec<String>);

impl PolySpec {
    pub fn new(terms: &[&str]) -> Self {
        Self(terms.iter().map(|t| t.to_string()).collect())
    }

    pub fn parse(&self, nvars: usize) -> Result<Polynomial<Rational>> {
        if self.0.is_empty() {
            return schema("a polynomial needs at least one term");
        }
        let p = parse_polynomial(&self.0.join("\n")).map_err(|e| ExperimentError::Schema(format!("polynomial: {e}")))?;
        if p.nvars() != nvars {
            return schema(format!("expected a polynomial in {nvars} variables, got {}", p.nvars()));
        }
        Ok(p)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PartitionAuditParams {
    /// Partition parameters `N`; each run partitions `N²` directions.
    pub n_values: Vec<u32>,
    pub e_values: Vec<u32>,
    /// Number of seeds, counted up from the run seed.
    pub seeds: u32,
    pub delta: f64,
    pub planes: usize,
    /// Band width `s`; planes sit at `a = ±offset·s`.
    pub band: f64,
    pub offset: f64,
    /// Crossing budget per unit of `E`.
    pub budget_factor: u32,
    pub dense_samples: usize,
}

impl Default for PartitionAuditParams {
    fn default() -> Self {
        Self {
            n_values: vec![16, 32],
            e_values: vec![2, 4],
            seeds: 5,
            delta: 1e-3,
            planes: 200,
            band: 1.0 / 32.0,
            offset: 3.0,
            budget_factor: 32,
            dense_samples: 20_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SphereGrowthParams {
    pub n_values: Vec<u32>,
    /// Nets are `(c/N)`-nets with this `c`.
    pub net_constant: f64,
    pub samples: usize,
    pub slope_window: [f64; 2],
}

impl Default for SphereGrowthParams {
    fn default() -> Self {
        Self { n_values: vec![8, 16, 32, 64], net_constant: 0.5, samples: 200_000, slope_window: [0.40, 0.65] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSpec {
    pub label: String,
    /// `P` in `Z(P, x² + y² + z² − 1)`.
    pub poly: PolySpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CurveGrowthParams {
    pub curves: Vec<CurveSpec>,
    pub n_values: Vec<u32>,
    pub samples: usize,
    pub slope_max: f64,
    /// Tracing step length.
    pub resolution: f64,
}

impl Default for CurveGrowthParams {
    fn default() -> Self {
        Self {
            curves: vec![
                CurveSpec { label: "great-circle".into(), poly: PolySpec::new(&["1 0 0 1"]) },
                CurveSpec { label: "cubic".into(), poly: PolySpec::new(&["1 0 0 1", "-1/2 3 0 0", "3/2 1 2 0"]) },
            ],
            n_values: vec![16, 32, 64, 128, 256],
            samples: 200_000,
            slope_max: 0.10,
            resolution: 1e-3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NikodymParams {
    pub deltas: Vec<f64>,
    pub samples: usize,
    pub slope_window: [f64; 2],
}

impl Default for NikodymParams {
    fn default() -> Self {
        Self { deltas: vec![1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0], samples: 200_000, slope_window: [0.35, 0.70] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RecursionAuditParams {
    pub n: u32,
    pub e: u32,
    pub delta: f64,
    pub band: f64,
    pub planes: usize,
    pub budget_factor: u32,
    /// Cube grid for the frequency-side audit.
    pub grid_size: usize,
    pub box_len: f64,
    /// Index band of the random test functions.
    pub field_band: usize,
    pub fields: usize,
    /// Cells allowed in one band `R_{ξ,3s}` before it becomes a bad cluster.
    pub cluster_threshold: usize,
    /// Spacing of the net of band tops.
    pub top_spacing: f64,
}

impl Default for RecursionAuditParams {
    fn default() -> Self {
        Self {
            n: 16,
            e: 2,
            delta: 1e-3,
            band: 1.0 / 32.0,
            planes: 200,
            budget_factor: 32,
            grid_size: 32,
            box_len: 32.0,
            field_band: 10,
            fields: 3,
            cluster_threshold: 12,
            top_spacing: 0.05,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectionCase {
    pub label: String,
    /// Second generator next to the unit sphere, in `x, y, z`.
    pub poly: PolySpec,
    pub s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProjectionDemoParams {
    pub cases: Vec<ProjectionCase>,
    pub audit_samples: usize,
    pub budget: usize,
}

impl Default for ProjectionDemoParams {
    fn default() -> Self {
        Self {
            cases: vec![
                ProjectionCase { label: "latitude-circle".into(), poly: PolySpec::new(&["1 0 0 1", "-1/10 0 0 0"]), s: 0.2 },
                ProjectionCase { label: "saddle".into(), poly: PolySpec::new(&["1 0 0 1", "-1 1 1 0"]), s: 0.1 },
            ],
            audit_samples: 200,
            budget: 100_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSeries {
    pub exponent: f64,
    /// Multiplies the power by `(log N)^log_power`.
    #[serde(default)]
    pub log_power: f64,
    pub n_values: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GrowthFitParams {
    pub series: Option<Vec<(f64, f64)>>,
    pub synthetic: Option<SyntheticSeries>,
    pub expected_slope: Option<f64>,
    pub tolerance: f64,
}

impl Default for GrowthFitParams {
    fn default() -> Self {
        Self {
            series: None,
            synthetic: Some(SyntheticSeries { exponent: 0.5, log_power: 0.0, n_values: vec![8, 16, 32, 64] }),
            expected_slope: Some(0.5),
            tolerance: 1e-12,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Params {
    PartitionAudit(PartitionAuditParams),
    SphereGrowth(SphereGrowthParams),
    CurveGrowth(CurveGrowthParams),
    Nikodym(NikodymParams),
    RecursionAudit(RecursionAuditParams),
    ProjectionDemo(ProjectionDemoParams),
    GrowthFit(GrowthFitParams),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    scenario: Option<ScenarioName>,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    params: Option<Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub scenario: ScenarioName,
    pub seed: u64,
    pub params: Params,
}

fn parse_params<T: serde::de::DeserializeOwned + Default>(v: Option<Value>) -> Result<T> {
    match v {
        None => Ok(T::default()),
        Some(v) => serde_json::from_value(v).map_err(|e| ExperimentError::Schema(e.to_string())),
    }
}

fn increasing(name: &str, v: &[u32], min_len: usize) -> Result<()> {
    if v.len() < min_len {
        return schema(format!("`{name}` needs at least {min_len} values"));
    }
    if v.windows(2).any(|w| w[0] >= w[1]) {
        return schema(format!("`{name}` must be strictly increasing"));
    }
    Ok(())
}

fn positive(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0 && x.is_finite()) {
        return schema(format!("`{name}` must be positive, got {x}"));
    }
    Ok(())
}

fn window(name: &str, w: [f64; 2]) -> Result<()> {
    if !(w[0].is_finite() && w[1].is_finite() && w[0] <= w[1]) {
        return schema(format!("`{name}` must be an ordered pair"));
    }
    Ok(())
}

impl ScenarioConfig {
    pub fn default_for(scenario: ScenarioName) -> Self {
        let params = match scenario {
            ScenarioName::PartitionAudit => Params::PartitionAudit(Default::default()),
            ScenarioName::SphereGrowth => Params::SphereGrowth(Default::default()),
            ScenarioName::CurveGrowth => Params::CurveGrowth(Default::default()),
            ScenarioName::Nikodym => Params::Nikodym(Default::default()),
            ScenarioName::RecursionAudit => Params::RecursionAudit(Default::default()),
            ScenarioName::ProjectionDemo => Params::ProjectionDemo(Default::default()),
            ScenarioName::GrowthFit => Params::GrowthFit(Default::default()),
        };
        Self { scenario, seed: 0, params }
    }

    /// Parses and validates. `expected` is the scenario named on the command
    /// line; the file may omit its own `scenario` field but must not contradict it.
    pub fn from_json(text: &str, expected: Option<ScenarioName>) -> Result<Self> {
        let raw: RawConfig = serde_json::from_str(text).map_err(|e| ExperimentError::Schema(e.to_string()))?;
        let scenario = match (raw.scenario, expected) {
            (Some(a), Some(b)) if a != b => return schema(format!("config is for `{a}`, not `{b}`")),
            (Some(a), _) | (None, Some(a)) => a,
            (None, None) => return schema("missing `scenario`"),
        };
        let params = match scenario {
            ScenarioName::PartitionAudit => Params::PartitionAudit(parse_params(raw.params)?),
            ScenarioName::SphereGrowth => Params::SphereGrowth(parse_params(raw.params)?),
            ScenarioName::CurveGrowth => Params::CurveGrowth(parse_params(raw.params)?),
            ScenarioName::Nikodym => Params::Nikodym(parse_params(raw.params)?),
            ScenarioName::RecursionAudit => Params::RecursionAudit(parse_params(raw.params)?),
            ScenarioName::ProjectionDemo => Params::ProjectionDemo(parse_params(raw.params)?),
            ScenarioName::GrowthFit => Params::GrowthFit(parse_params(raw.params)?),
        };
        let cfg = Self { scenario, seed: raw.seed, params };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path, expected: Option<ScenarioName>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?, expected)
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("configs serialize")
    }

    pub fn validate(&self) -> Result<()> {
        match &self.params {
            Params::PartitionAudit(p) => {
                increasing("n_values", &p.n_values, 1)?;
                if p.e_values.is_empty() || p.e_values.contains(&0) {
                    return schema("`e_values` must be nonempty with every E ≥ 1");
                }
                if let Some(&e) = p.e_values.iter().find(|&&e| e > p.n_values[0]) {
                    return schema(format!("E = {e} exceeds the smallest N"));
                }
                if p.n_values.iter().any(|&n| n > 64) {
                    return schema("N above 64 would partition more than 4096 directions");
                }
                if p.seeds == 0 || p.planes == 0 || p.budget_factor == 0 || p.dense_samples == 0 {
                    return schema("`seeds`, `planes`, `budget_factor` and `dense_samples` must be positive");
                }
                positive("delta", p.delta)?;
                positive("band", p.band)?;
                positive("offset", p.offset)?;
                if p.delta >= 0.1 {
                    return schema("`delta` must be below 0.1");
                }
            }
            Params::SphereGrowth(p) => {
                increasing("n_values", &p.n_values, 3)?;
                if p.n_values[0] < 2 {
                    return schema("N must be at least 2");
                }
                if !(p.net_constant > 0.0 && p.net_constant <= 1.0) {
                    return schema("`net_constant` must lie in (0, 1]");
                }
                if p.samples < 1000 {
                    return schema("`samples` must be at least 1000");
                }
                window("slope_window", p.slope_window)?;
            }
            Params::CurveGrowth(p) => {
                if p.curves.is_empty() {
                    return schema("`curves` must not be empty");
                }
                for c in &p.curves {
                    let poly = c.poly.parse(3)?;
                    if poly.degree().unwrap_or(0) == 0 {
                        return schema(format!("curve `{}` needs a nonconstant polynomial", c.label));
                    }
                }
                increasing("n_values", &p.n_values, 3)?;
                if p.n_values[0] < 2 {
                    return schema("N must be at least 2");
                }
                if p.samples < 1000 {
                    return schema("`samples` must be at least 1000");
                }
                positive("slope_max", p.slope_max)?;
                positive("resolution", p.resolution)?;
                if p.resolution > 0.05 {
                    return schema("`resolution` must be at most 0.05");
                }
            }
            Params::Nikodym(p) => {
                if p.deltas.len() < 3 {
                    return schema("`deltas` needs at least 3 values");
                }
                if p.deltas.windows(2).any(|w| w[0] <= w[1]) || p.deltas.iter().any(|&d| !(d > 0.0 && d < 0.25)) {
                    return schema("`deltas` must decrease strictly inside (0, 1/4)");
                }
                if p.deltas.iter().any(|&d| d < 1.0 / 128.0) {
                    return schema("δ below 1/128 needs a net too large for the tube route");
                }
                if p.samples < 1000 {
                    return schema("`samples` must be at least 1000");
                }
                window("slope_window", p.slope_window)?;
            }
            Params::RecursionAudit(p) => {
                if p.e == 0 || p.n == 0 || p.e > p.n || p.n > 64 {
                    return schema("need 1 ≤ E ≤ N ≤ 64");
                }
                if !p.grid_size.is_power_of_two() || !(8..=64).contains(&p.grid_size) {
                    return schema("`grid_size` must be a power of two in [8, 64]");
                }
                if p.field_band == 0 || p.field_band >= p.grid_size / 2 {
                    return schema("`field_band` must lie in [1, grid_size/2)");
                }
                if p.fields == 0 || p.planes == 0 || p.budget_factor == 0 || p.cluster_threshold == 0 {
                    return schema("`fields`, `planes`, `budget_factor` and `cluster_threshold` must be positive");
                }
                positive("delta", p.delta)?;
                positive("band", p.band)?;
                positive("box_len", p.box_len)?;
                if !(p.top_spacing > 0.005 && p.top_spacing < 1.0) {
                    return schema("`top_spacing` must lie in (0.005, 1)");
                }
            }
            Params::ProjectionDemo(p) => {
                for c in &p.cases {
                    c.poly.parse(3)?;
                    positive("s", c.s)?;
                    if c.s >= 1.0 {
                        return schema("slab widths must be below 1");
                    }
                }
                if p.audit_samples == 0 || p.budget == 0 {
                    return schema("`audit_samples` and `budget` must be positive");
                }
            }
            Params::GrowthFit(p) => {
                match (&p.series, &p.synthetic) {
                    (None, None) => return schema("give `series` or `synthetic`"),
                    (Some(_), Some(_)) => return schema("give only one of `series` and `synthetic`"),
                    (Some(s), None) => {
                        if s.len() < 3 || s.iter().any(|&(n, e)| !(n > 0.0 && e > 0.0)) {
                            return schema("`series` needs at least 3 points with positive N and estimate");
                        }
                    }
                    (None, Some(s)) => {
                        increasing("synthetic.n_values", &s.n_values, 3)?;
                        if s.n_values[0] < 2 {
                            return schema("synthetic N must be at least 2");
                        }
                    }
                }
                positive("tolerance", p.tolerance)?;
            }
        }
        Ok(())
    }
}
