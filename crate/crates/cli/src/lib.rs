//! Experiment harness: JSON configs in, per-iteration logs and certificate
//! reports out.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod run;
pub mod sweep;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::{Algorithm, ExperimentConfig, GridAxis, ScheduleConfig, SweepGrid};
pub use error::CliError;
pub use run::{run_experiment, RunOutcome, Summary};
pub use sweep::{sweep, SweepRow};

#[derive(Debug, Parser)]
#[command(name = "hprox", version, about = "Inexact proximal point experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides the config's output_dir.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Overrides the config's seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one experiment.
    Run(Common),
    /// Run a parameter grid over a base experiment.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        grid: PathBuf,
    },
}

fn load(common: &Common) -> Result<ExperimentConfig, CliError> {
    let mut cfg = ExperimentConfig::load(&common.config)?;
    if let Some(out) = &common.out {
        cfg.output_dir = out.clone();
    }
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

/// Executes a parsed command and returns the process exit code.
pub fn execute(cli: &Cli) -> i32 {
    let result = match &cli.command {
        Command::Run(common) => load(common).and_then(|cfg| run_experiment(&cfg)).map(|o| {
            println!(
                "{}: {:?} after {} iterations",
                o.summary.problem, o.summary.status, o.summary.diagnostics.iterations
            );
        }),
        Command::Sweep { common, grid } => load(common).and_then(|cfg| {
            let grid = SweepGrid::load(grid)?;
            let rows = sweep(&cfg, &grid, &cfg.output_dir)?;
            println!(
                "{} cells written to {}",
                rows.len(),
                cfg.output_dir.display()
            );
            Ok(())
        }),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("hprox: {e}");
            e.exit_code()
        }
    }
}
