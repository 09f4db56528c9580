use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use vardir_experiments::{run_scenario, worker_count, RunOptions, ScenarioConfig, ScenarioName};

/// Run one experiment scenario and write its report.
#[derive(Parser, Debug)]
#[command(name = "vardir", version)]
struct Cli {
    /// partition-audit, sphere-growth, curve-growth, nikodym, recursion-audit,
    /// projection-demo or growth-fit
    scenario: ScenarioName,
    /// JSON config; see CONFIG.md
    #[arg(long)]
    config: PathBuf,
    /// Output directory
    #[arg(long)]
    out: PathBuf,
    /// Overrides the seed in the config
    #[arg(long)]
    seed: Option<u64>,
    /// Worker cap, further capped by VARDIR_THREADS
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut cfg = match ScenarioConfig::load(&cli.config, Some(cli.scenario)) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("vardir: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    let opts = RunOptions { workers: Some(worker_count(cli.threads)), out: Some(cli.out.clone()) };
    match run_scenario(&cfg, &opts) {
        Ok(report) => {
            print!("{}", report.table());
            println!("report: {}", cli.out.join("report.json").display());
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("vardir: {e}");
            ExitCode::from(2)
        }
    }
}
