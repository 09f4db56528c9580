//! Scenario reports: JSON summary, step files and a gnuplot script.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::ScenarioConfig;
use crate::dag::{Check, StepResult, StepStatus};
use crate::error::Result;

/// SHA-256 of every workspace crate's manifest and sources, fixed at build time.
pub fn source_hashes() -> BTreeMap<String, String> {
    env!("VARDIR_SOURCE_HASHES")
        .split(';')
        .filter_map(|kv| kv.split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub name: String,
    pub deps: Vec<String>,
    pub status: StepStatus,
    pub measurements: BTreeMap<String, Value>,
    pub checks: Vec<Check>,
    pub files: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub steps: usize,
    pub completed: usize,
    pub failed: Vec<String>,
    pub skipped: Vec<String>,
    pub checks: usize,
    /// `step/check` for every check that did not pass.
    pub failed_checks: Vec<String>,
    pub passed: bool,
}

/// Everything that may differ between two runs of the same config.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub unix_seconds: u64,
    pub workers: usize,
    pub total_seconds: f64,
    pub steps: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub scenario: String,
    pub seed: u64,
    pub config: Value,
    pub versions: BTreeMap<String, String>,
    pub steps: Vec<StepRecord>,
    pub summary: Summary,
    pub timing: Timing,
}

impl Report {
    pub fn new(cfg: &ScenarioConfig, results: &[StepResult], workers: usize, total_seconds: f64) -> Self {
        let mut failed = Vec::new();
        let mut skipped = Vec::new();
        let mut failed_checks = Vec::new();
        let mut checks = 0;
        for r in results {
            match r.status {
                StepStatus::Completed => {}
                StepStatus::Failed { .. } => failed.push(r.name.clone()),
                StepStatus::Skipped { .. } => skipped.push(r.name.clone()),
            }
            checks += r.checks.len();
            failed_checks.extend(r.checks.iter().filter(|c| !c.passed).map(|c| format!("{}/{}", r.name, c.name)));
        }
        let passed = failed.is_empty() && skipped.is_empty() && failed_checks.is_empty();
        let unix_seconds = std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        Self {
            scenario: cfg.scenario.to_string(),
            seed: cfg.seed,
            config: cfg.to_json(),
            versions: source_hashes(),
            steps: results
                .iter()
                .map(|r| StepRecord {
                    name: r.name.clone(),
                    deps: r.deps.clone(),
                    status: r.status.clone(),
                    measurements: r.measurements.clone(),
                    checks: r.checks.clone(),
                    files: r.files.iter().map(|f| f.name.clone()).collect(),
                })
                .collect(),
            summary: Summary { steps: results.len(), completed: results.len() - failed.len() - skipped.len(), failed, skipped, checks, failed_checks, passed },
            timing: Timing { unix_seconds, workers, total_seconds, steps: results.iter().map(|r| (r.name.clone(), r.seconds)).collect() },
        }
    }

    pub fn passed(&self) -> bool {
        self.summary.passed
    }

    pub fn step(&self, name: &str) -> Option<&StepRecord> {
        self.steps.iter().find(|s| s.name == name)
    }

    /// The report without its timing field; equal configs give equal values.
    pub fn deterministic(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("reports serialize");
        if let Value::Object(m) = &mut v {
            m.remove("timing");
        }
        v
    }

    /// One line per step, then the verdict.
    pub fn table(&self) -> String {
        let mut s = String::new();
        for step in &self.steps {
            let state = match &step.status {
                StepStatus::Completed => "ok".to_string(),
                StepStatus::Failed { error } => format!("FAILED ({error})"),
                StepStatus::Skipped { reason } => format!("skipped ({reason})"),
            };
            let bad = step.checks.iter().filter(|c| !c.passed).count();
            let _ = writeln!(s, "{:<40} {state}; checks {}/{} passed", step.name, step.checks.len() - bad, step.checks.len());
            for c in step.checks.iter().filter(|c| !c.passed) {
                let _ = writeln!(s, "    {}: {}", c.name, c.detail);
            }
        }
        let _ = writeln!(s, "{}: {}", self.scenario, if self.passed() { "all invariants pass" } else { "invariants violated" });
        s
    }

    /// Writes `report.json`, every step file and `plot.gp` into `dir`.
    pub fn write(&self, dir: &Path, results: &[StepResult]) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let mut files = Vec::new();
        for r in results {
            for f in &r.files {
                std::fs::write(dir.join(&f.name), &f.contents)?;
                files.push(f.name.clone());
            }
        }
        std::fs::write(dir.join("report.json"), serde_json::to_string_pretty(self)?)?;
        std::fs::write(dir.join("plot.gp"), gnuplot_script(&self.scenario, &files))?;
        Ok(())
    }
}

/// Plots for the CSV files a scenario wrote, by file-name prefix: `fit-*`
/// series on log-log axes, `crossings-*` counts per plane, `curve-*` traced
/// polylines.
pub fn gnuplot_script(scenario: &str, files: &[String]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# {scenario}: run `gnuplot plot.gp` in this directory");
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set terminal pngcairo size 900,600");
    let mut any = false;
    for f in files.iter().filter(|f| f.ends_with(".csv")) {
        let stem = f.trim_end_matches(".csv");
        if stem.starts_with("fit-") {
            let _ = writeln!(s, "\nset output '{stem}.png'\nset logscale xy\nset xlabel 'N'\nset ylabel 'estimate'");
            let _ = writeln!(s, "plot '{f}' every ::1 using 1:2 with points pt 7 title 'measured', '' every ::1 using 1:3 with lines title 'fit'");
            let _ = writeln!(s, "unset logscale");
        } else if stem.starts_with("crossings-") {
            let _ = writeln!(s, "\nset output '{stem}.png'\nset xlabel 'plane'\nset ylabel 'cells crossed'");
            let _ = writeln!(s, "plot '{f}' every ::1 using 0:5 with impulses title 'count'");
        } else if stem.starts_with("curve-") {
            let _ = writeln!(s, "\nset output '{stem}.png'\nset view equal xyz");
            let _ = writeln!(s, "splot '{f}' every ::1 using 3:4:5 with dots title '{stem}'");
        } else {
            continue;
        }
        any = true;
    }
    if !any {
        let _ = writeln!(s, "\nprint 'this scenario writes no plottable series'");
    }
    s
}
