//! `rough-metric`: distances, convergence runs, witness searches and metric
//! export from the command line.
//!
//! Exit codes: 0 on success, 2 on bad arguments, 3 on an invalid solver
//! configuration, 1 on any other failure.

mod args;
mod commands;

use std::fmt;
use std::process::ExitCode;

use clap::Parser;

use rough_metric::{FamilyError, LabError, MetricError, SolverError};

use args::{Cli, FileConfig};

/// A problem with the arguments that no core error type describes.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<SolverError>() {
            return match e {
                SolverError::Config(_) => 3,
                SolverError::Metric(_) => 2,
            };
        }
        if let Some(e) = cause.downcast_ref::<LabError>() {
            match e {
                LabError::Solver(SolverError::Config(_)) => return 3,
                LabError::Io(_) | LabError::Csv(_) | LabError::Json(_) => return 1,
                LabError::Solver(_) | LabError::Family(_) | LabError::EmptySample | LabError::Argument(_) => {
                    return 2
                }
                _ => {}
            }
        }
        if cause.is::<UsageError>() || cause.is::<FamilyError>() || cause.is::<MetricError>() {
            return 2;
        }
    }
    1
}

fn configure_threads() -> Result<(), UsageError> {
    let Ok(value) = std::env::var("ROUGH_METRIC_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .map_err(|_| UsageError(format!("ROUGH_METRIC_THREADS must be a non-negative integer, got `{value}`")))?;
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| UsageError(format!("cannot configure {threads} threads: {e}")))?;
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    configure_threads()?;
    let file = FileConfig::load(cli.config.as_deref())?;
    match cli.command {
        args::Command::Distance(a) => commands::distance(&a, &file),
        args::Command::Converge(a) => commands::converge(&a, &file),
        args::Command::Witness(a) => commands::witness(&a, &file),
        args::Command::Export(a) => commands::export(&a, &file),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("rough-metric: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
