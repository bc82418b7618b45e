//! `qevac` — deterministic pedestrian earthquake-evacuation simulator.
//!
//! Subcommands: `run` a scenario, `debris` batch computation, `synth` a
//! synthetic city, `compare` two result directories.

mod cmd_compare;
mod cmd_debris;
mod cmd_run;
mod cmd_synth;

use clap::{Parser, Subcommand};
use std::process::ExitCode;

/// A command failure mapped onto the process exit code: validation
/// problems exit 1, runtime problems exit 2.
pub(crate) enum Failure {
    Validation(String),
    Runtime(String),
}

impl Failure {
    pub(crate) fn validation(e: impl ToString) -> Self {
        Failure::Validation(e.to_string())
    }

    pub(crate) fn runtime(e: impl ToString) -> Self {
        Failure::Runtime(e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "qevac",
    version,
    about = "Pedestrian earthquake-evacuation simulation to open spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a simulation scenario and write result files.
    Run(cmd_run::RunArgs),
    /// Compute debris geometry for a building file.
    Debris(cmd_debris::DebrisArgs),
    /// Generate a synthetic city input bundle.
    Synth(cmd_synth::SynthArgs),
    /// Compare the safe-count curves of two result directories.
    Compare(cmd_compare::CompareArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => cmd_run::run(args),
        Command::Debris(args) => cmd_debris::run(args),
        Command::Synth(args) => cmd_synth::run(args),
        Command::Compare(args) => cmd_compare::run(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
