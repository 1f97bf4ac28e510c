//! `cheshire`: weak-value reports, post-selection synthesis, circuit runs and
//! pointer sweeps from the command line.
//!
//! Exit codes: 0 success, 1 result mismatch, 2 usage or malformed input,
//! 3 infeasible, degenerate or anomalous selection, 4 I/O failure.

mod commands;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use cheshire_core::Error;

/// Seed used when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, Parser)]
#[command(name = "cheshire", version, about = "Entangled quantum Cheshire cat weak-value simulator")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    pub format: Format,
    /// Seed for Monte Carlo sampling.
    #[arg(long, default_value_t = DEFAULT_SEED, global = true)]
    pub seed: u64,
    /// Match tolerance for pass/fail decisions.
    #[arg(long, default_value_t = 1e-10, global = true, value_parser = positive_f64)]
    pub tol: f64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Counts,
    Probs,
    ConditionalState,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Weak-value report of a built-in scenario, checked against its expected pattern.
    Scenario {
        /// `single`, `two-cat`, `general:θ=pi/3,φ=0.5` or `n-cat:n=5`.
        id: String,
    },
    /// Synthesize a post-selected state from a problem file.
    Solve {
        problem: PathBuf,
    },
    /// Run a circuit description file. Circuits with a `target` are calibrated first.
    Circuit {
        file: PathBuf,
        /// Monte Carlo shots for `--emit counts`.
        #[arg(long, default_value_t = 60_000, value_parser = clap::value_parser!(u64).range(1..))]
        shots: u64,
        #[arg(long, value_enum, default_value_t = Emit::Probs)]
        emit: Emit,
    },
    /// Weak-measurement pointer sweep for one observable of a scenario.
    Pointer {
        id: String,
        /// `path:i:L|R`, `grin:i:L|R`, `sigma:i` or `identity`.
        observable: String,
        /// Coupling strengths, strongest first.
        #[arg(long = "g", value_delimiter = ',', default_values_t = [1e-2, 5e-3, 2.5e-3], value_parser = positive_f64)]
        couplings: Vec<f64>,
    },
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("`{s}` is not a positive number")),
    }
}

/// Why a command did not succeed.
#[derive(Debug)]
pub enum Failure {
    /// The command ran but its check did not pass; output was already printed.
    Mismatch,
    Core(Error),
    Io(PathBuf, std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Input(_) | Error::Parse { .. } | Error::Configuration(_) => 2,
        Error::Degenerate(_)
        | Error::AnomalousSelection { .. }
        | Error::DegenerateScenario(_)
        | Error::Infeasible(_)
        | Error::VacuousSelection
        | Error::CalibrationFailed { .. } => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Mismatch) => ExitCode::from(1),
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(Failure::Io(path, e)) => {
            eprintln!("error: {}: {e}", path.display());
            ExitCode::from(4)
        }
    }
}
