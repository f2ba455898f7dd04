//! `floquet`: characteristic multipliers of periodic orbits from the command
//! line.
//!
//! Exit codes: 0 success, 1 usage, parse or configuration error, 2 failed
//! hypothesis, verification or numerical check.

mod commands;
mod error;
mod report;
mod sysfile;
mod target;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use crate::commands::{AnalyzeArgs, ChartArgs, SteklovArgs, VerifyArgs};

#[derive(Debug, Parser)]
#[command(
    name = "floquet",
    version,
    about = "Characteristic multipliers of periodic orbits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute multipliers by the cofactor and/or variational route.
    Analyze(AnalyzeArgs),
    /// Check the orbit, invariance and transversality hypotheses.
    Verify(VerifyArgs),
    /// Stability chart of the Mathieu system as CSV.
    Chart(ChartArgs),
    /// Monodromy structure and stability of the Steklov rigid-body orbit.
    Steklov(SteklovArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let result = match &cli.command {
        Command::Analyze(args) => commands::analyze(args),
        Command::Verify(args) => commands::verify(args),
        Command::Chart(args) => commands::chart(args),
        Command::Steklov(args) => commands::steklov(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
