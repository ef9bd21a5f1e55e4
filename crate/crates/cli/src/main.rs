//! `quasiecho`: batch runs of the kicked top and kicked rotor echo experiments.
//!
//! Every run is described by a [`config::RunConfig`] (JSON file, flags, or
//! both). Errors go to stderr as one JSON line; exit codes are 2 for
//! configuration errors, 3 for numerical failures and 4 for I/O errors.

mod config;
mod error;
mod figures;
mod run;

use std::process::ExitCode;

use clap::Parser;

use crate::config::{parse_command, Command, Flags, RunConfig};
use crate::error::{config as config_error, CliError};

#[derive(Debug, Parser)]
#[command(name = "quasiecho", version, about)]
struct Cli {
    /// portrait, evolve, sweep, spectrum, fit, scaling or reproduce.
    #[arg(value_parser = parse_command)]
    command: Option<Command>,
    #[command(flatten)]
    flags: Flags,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(&config_error(e.to_string().trim_end())),
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let base = match &cli.flags.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let config = base.overlay(cli.command, cli.flags);
    if let Some(jobs) = config.jobs {
        if jobs == 0 {
            return Err(config_error("jobs must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| config_error(format!("cannot start {jobs} worker threads: {e}")))?;
    }
    run::run(config)
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("{}", e.to_json_line());
    ExitCode::from(e.exit_code())
}
