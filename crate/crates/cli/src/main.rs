#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use stirling::MachineKind;

mod commands;
mod config;
mod error;
mod output;

use commands::{Common, RegimeMapArgs};
use config::Format;
use error::CliError;

/// Finite-time regenerative Stirling engines and refrigerators with bosonic
/// or fermionic oscillator working media.
#[derive(Parser, Debug)]
#[command(name = "qstirling", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML run configuration.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output file (stdout when omitted).
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Worker threads for grid computations.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Heats, work, efficiency, power and stroke times of the engine.
    Engine,
    /// Heats, work, coefficient of performance and cooling rate of the refrigerator.
    Fridge,
    /// Ratio of low- to high-temperature heat conduction over a (q, x) grid.
    RegimeMap {
        #[arg(long, default_value_t = -0.99, allow_hyphen_values = true)]
        q_min: f64,
        #[arg(long, default_value_t = -0.01, allow_hyphen_values = true)]
        q_max: f64,
        #[arg(long, default_value_t = 0.075)]
        x_min: f64,
        #[arg(long, default_value_t = 15.0)]
        x_max: f64,
        #[arg(long, default_value_t = 200)]
        grid: usize,
    },
    /// Efficiency and dimensionless power over x = beta1 * omega1.
    PowerSweep {
        /// `start:stop:count` or comma-separated values, strictly increasing.
        #[arg(long, default_value = "0.5:10:191")]
        x_grid: String,
    },
    /// Runs the invariant checks on a configuration.
    Validate,
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("--threads: {e}")))?;
    }
    let common = Common { config: cli.config, out: cli.out, format: cli.format };
    match cli.command {
        Command::Engine => commands::run_machine(&common, MachineKind::Engine),
        Command::Fridge => commands::run_machine(&common, MachineKind::Fridge),
        Command::RegimeMap { q_min, q_max, x_min, x_max, grid } => {
            commands::run_regime_map(&common, &RegimeMapArgs { q_min, q_max, x_min, x_max, grid })
        }
        Command::PowerSweep { x_grid } => commands::run_power_sweep(&common, &x_grid),
        Command::Validate => commands::run_validate(&common),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qstirling: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
