//! `evoipd`: run tournaments and Moran batches over strategy sets, then derive
//! metrics and plot data from the results.
//!
//! Exit status: 0 success, 2 configuration or usage error, 3 bad input data
//! (such as a strategy that fails to parse), 4 internal error.

mod commands;
mod common;
mod error;
mod inputs;
mod manifest;
mod table;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::{metrics, moran, report, synth, tournament, validate};
use crate::error::{exit, CliResult};

#[derive(Parser, Debug)]
#[command(name = "evoipd", version, about = "Attitude-conditioned iterated prisoner's dilemma experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Round-robin tournament per model–prompt pair.
    Tournament(tournament::TournamentArgs),
    /// Moran-process equilibria over a condition grid.
    Moran(moran::MoranArgs),
    /// ICD, noise sensitivity, entropy, separation and pairwise z-tests.
    Metrics(metrics::MetricsArgs),
    /// Plot data for equilibrium bars and ICD bars.
    Report(report::ReportArgs),
    /// Write synthetic strategy sets.
    Synth(synth::SynthArgs),
    /// Parse-check strategy sets.
    Validate(validate::ValidateArgs),
}

fn dispatch(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Tournament(a) => tournament::run(a),
        Command::Moran(a) => moran::run(a),
        Command::Metrics(a) => metrics::run(a),
        Command::Report(a) => report::run(a),
        Command::Synth(a) => synth::run(a),
        Command::Validate(a) => validate::run(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match std::panic::catch_unwind(|| dispatch(cli)) {
        Ok(Ok(())) => ExitCode::from(exit::OK),
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
        Err(_) => ExitCode::from(exit::INTERNAL),
    }
}
