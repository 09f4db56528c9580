//! Scenario runner: builds a step graph per scenario, executes it on a bounded
//! pool and writes a reproducible report.

pub mod config;
pub mod dag;
pub mod error;
pub mod report;
pub mod scenarios;

use std::path::PathBuf;
use std::time::Instant;

pub use config::{Params, PolySpec, ScenarioConfig, ScenarioName};
pub use dag::{Check, Plan, StepOutput, StepResult, StepStatus};
pub use error::{ExperimentError, Result};
pub use report::{gnuplot_script, source_hashes, Report};

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "VARDIR_THREADS";

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Worker cap; `None` uses [`worker_count`].
    pub workers: Option<usize>,
    /// Directory for `report.json`, step files and `plot.gp`.
    pub out: Option<PathBuf>,
}

/// The smallest of the requested count, `VARDIR_THREADS` and the available
/// parallelism; at least 1.
pub fn worker_count(requested: Option<usize>) -> usize {
    let available = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    let env = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()).filter(|&n| n > 0);
    [Some(available), env, requested.filter(|&n| n > 0)].into_iter().flatten().min().unwrap_or(1).max(1)
}

/// Validates `cfg`, runs its steps and returns the report, writing it out
/// when a directory is given.
pub fn run_scenario(cfg: &ScenarioConfig, opts: &RunOptions) -> Result<Report> {
    cfg.validate()?;
    let workers = opts.workers.unwrap_or_else(|| worker_count(None)).max(1);
    let start = Instant::now();
    let results = scenarios::plan(cfg).execute(workers);
    let report = Report::new(cfg, &results, workers, start.elapsed().as_secs_f64());
    if let Some(dir) = &opts.out {
        report.write(dir, &results)?;
    }
    Ok(report)
}
