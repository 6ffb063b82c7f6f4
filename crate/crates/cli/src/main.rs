//! `sectordisk`: robust stability analysis under sectored-disk uncertainty.

mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use commands::{RunConfig, Status};
use output::CliError;

const THREADS_VAR: &str = "SECTORDISK_THREADS";

fn init_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| CliError::Input(format!("{THREADS_VAR} must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Input(format!("cannot start {n} threads: {e}")))
}

fn run(cli: Cli) -> Result<Status, CliError> {
    init_threads()?;
    match cli.command {
        Command::AnalyzeMatrix { matrix, sector, draws, common } => {
            commands::analyze_matrix(&matrix, &sector, draws, &RunConfig::new(&common)?)
        }
        Command::Mu { matrix, alpha, rel_tol, common } => commands::mu(&matrix, alpha, rel_tol, &RunConfig::new(&common)?),
        Command::Dwshell { matrix, negate_inverse, sector, order, draws, dirs, common } => commands::dwshell_cmd(
            matrix.as_deref(),
            negate_inverse,
            &sector,
            order,
            draws,
            dirs,
            &RunConfig::new(&common)?,
        ),
        Command::AnalyzeSystem { model, bounds, mode, sector, grid, no_sentinels, common } => commands::analyze_system(
            &model,
            bounds.as_deref(),
            mode,
            &sector,
            grid,
            !no_sentinels,
            &RunConfig::new(&common)?,
        ),
        Command::Repro { id, rel_tol, common } => commands::repro_cmd(&id, rel_tol, &RunConfig::new(&common)?),
    }
}

fn main() -> ExitCode {
    // Usage errors exit with status 2 inside `parse`.
    let cli = Cli::parse();
    match run(cli) {
        Ok(Status::Certified) => ExitCode::SUCCESS,
        Ok(Status::NotCertified) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
