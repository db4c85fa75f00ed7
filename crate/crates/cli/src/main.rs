//! Command-line front end for the smectic wall-defect model.
//!
//! Exit codes: 0 on success, 2 on usage/configuration errors, 3 when a
//! solve finishes without reaching the gradient tolerance (diagnostics are
//! still written), 1 on other failures.

mod args;
mod commands;
mod config_file;
mod output;

use args::{Cli, Command};
use clap::Parser;
use commands::{CliError, Outcome};
use std::process::ExitCode;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Density(a) => commands::density::run(a),
        Command::Rectangle(a) => commands::rectangle::run(a),
        Command::Quarter(a) => commands::quarter::run(a),
        Command::Zigzag(a) => commands::zigzag::run(a),
        Command::Probe(a) => commands::probe::run(a),
        Command::Sweep(a) => commands::sweep::run(a),
    };
    match result {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::NonConvergence) => ExitCode::from(3),
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
