//! `rwre <kind> [--config FILE] [--seed N] [--out DIR] [--jobs N] [--key value ...]`
//!
//! Exit status: 0 on success, 2 when some task failed, 1 on a config error.

use clap::Parser;
use rwre::experiment::{run_experiment, ConfigMap, ExperimentConfig, ExperimentKind};
use rwre::Error;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "rwre", version, about = "Experiments on balanced random walks in random environments")]
struct Cli {
    /// gen-env, t1, sigma, dirichlet, homog, exit-law, sinks, stairs, holes,
    /// dist-tail, harnack, osc or abp-check.
    kind: String,

    /// Flat `key = value` config file.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Master seed; task seeds are derived from it.
    #[arg(long)]
    seed: Option<u64>,

    #[arg(long)]
    out: Option<PathBuf>,

    /// Worker threads. Results do not depend on it.
    #[arg(long)]
    jobs: Option<usize>,

    /// Further `--key value` pairs, overriding the config file.
    #[arg(trailing_var_arg = true, allow_hyphen_values = true)]
    overrides: Vec<String>,
}

fn build_config(cli: &Cli) -> rwre::Result<ExperimentConfig> {
    let kind: ExperimentKind = cli.kind.parse()?;
    let mut map = match &cli.config {
        Some(p) => ConfigMap::load(p)?,
        None => ConfigMap::default(),
    };
    if let Some(s) = cli.seed {
        map.set("seed", s.to_string());
    }
    if let Some(o) = &cli.out {
        map.set("out", o.display().to_string());
    }
    if let Some(j) = cli.jobs {
        map.set("jobs", j.to_string());
    }
    map.apply_overrides(&cli.overrides)?;
    ExperimentConfig::from_map(kind, map)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match build_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("rwre: {e}");
            return ExitCode::from(1);
        }
    };
    match run_experiment(&cfg) {
        Ok(report) => {
            for t in report.tasks.iter().filter(|t| !t.ok()) {
                eprintln!("rwre: task {} ({}) failed: {}", t.id, t.label, t.status);
            }
            for p in &report.outputs {
                println!("{}", p.display());
            }
            println!("{}", report.manifest.display());
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e @ Error::Config { .. }) => {
            eprintln!("rwre: {e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("rwre: {e}");
            ExitCode::from(2)
        }
    }
}
