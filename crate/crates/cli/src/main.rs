//! `hw-staffing`: delay probabilities, staffing levels, sweeps, verification
//! suites and M/M/n simulation from the command line.
//!
//! Exit codes: 0 success, 1 verification failure, 2 domain or configuration
//! error, 3 numerical failure.

mod commands;
mod config;
mod output;
mod svg;

use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::{ComputeArgs, SimulateArgs, StaffArgs, SweepArgs, VerifyArgs};
use crate::config::QuadratureFlags;

#[derive(Debug, Parser)]
#[command(
    name = "hw-staffing",
    version,
    about = "Erlang C and Halfin-Whitt staffing toolkit"
)]
struct Cli {
    /// Quadrature settings file (`key = value`); falls back to $HW_STAFFING_CONFIG.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    #[command(flatten)]
    quadrature: QuadratureFlags,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Probability of waiting C(s, a).
    Compute(ComputeArgs),
    /// Servers needed to keep the delay probability at or below epsilon.
    Staff(StaffArgs),
    /// Evaluate C along a Halfin-Whitt curve and write CSV and/or SVG.
    Sweep(SweepArgs),
    /// Run the property suites.
    Verify(VerifyArgs),
    /// Discrete-event simulation of an M/M/n queue.
    Simulate(SimulateArgs),
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] hw_staffing::Error),
    #[error("{0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_domain() => 2,
            CliError::Core(_) | CliError::Numerical(_) => 3,
            CliError::Config(_) | CliError::Io(_) => 2,
        }
    }
}

/// What a successful command reports back: all good, or a failed verification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    VerificationFailed,
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    let cfg = config::resolve(cli.config.as_deref(), &cli.quadrature)?;
    match cli.command {
        Command::Compute(args) => commands::compute(&args, &cfg),
        Command::Staff(args) => commands::staff(&args, &cfg),
        Command::Sweep(args) => commands::sweep(&args, &cfg),
        Command::Verify(args) => commands::verify(&args, &cfg),
        Command::Simulate(args) => commands::simulate(&args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::VerificationFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
