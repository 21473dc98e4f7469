//! `ghz` -- verification suites, GHZ state reports, basis expansions,
//! Bloch-sphere sweeps, and secret-sharing protocol runs.
//!
//! Every invocation is deterministic given its full flag set: all
//! randomness flows from `--seed` through named sub-streams. Exit codes are
//! a stable contract: 0 success, 1 invariant/check failure, 2 usage error,
//! 3 I/O error.

mod commands;
mod config;

use std::process::ExitCode;

use clap::Parser;

use config::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
