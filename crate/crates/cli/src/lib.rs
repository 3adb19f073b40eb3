//! Command-line front end for the `naqc` crate.

pub mod args;
pub mod commands;
pub mod error;
pub mod mesh;
pub mod report;
pub mod states;

use std::ffi::OsString;
use std::io::Write;
use std::path::Path;

use clap::Parser;
use naqc::Exec;

use crate::args::{Cli, Command, RunConfig};
use crate::commands::{execute, grid_used};
use crate::error::CliError;
use crate::report::{detect_format, first_difference, read_config};

/// Runs the command line and returns the process exit code: 0 on success,
/// 1 when a counterexample, failing check or replay mismatch was found (or
/// the run failed), 2 on usage errors.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.global.workers.unwrap_or(0)).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return 1;
        }
    };
    match pool.install(|| dispatch(cli)) {
        Ok(failed) => i32::from(failed),
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn config_for(cli: Cli) -> RunConfig {
    let mut config = RunConfig {
        budget: cli.global.budget(),
        command: cli.command,
        global: cli.global,
        grid_used: None,
        version: env!("CARGO_PKG_VERSION").to_string(),
    };
    config.grid_used = grid_used(&config);
    config
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::failure(format!("{}: {e}", path.display()))),
        None => std::io::stdout().lock().write_all(text.as_bytes()).map_err(CliError::failure),
    }
}

/// Returns whether the run found something that should fail the exit code.
fn dispatch(cli: Cli) -> Result<bool, CliError> {
    if let Command::Replay(a) = &cli.command {
        let old = std::fs::read_to_string(&a.file)
            .map_err(|e| CliError::usage(format!("{}: {e}", a.file.display())))?;
        let format = detect_format(&old)?;
        let mut config = read_config(&old)?;
        if matches!(config.command, Command::Replay(_)) {
            return Err(CliError::usage("recorded config is itself a replay"));
        }
        // The recorded `out` stays in the config so the headers compare equal;
        // nothing is written there.
        config.global.workers = cli.global.workers;
        let outcome = execute(&config, Exec::default())?;
        let new = outcome.report.render(format)?;
        if let Some(path) = &cli.global.out {
            write_output(Some(path), &new)?;
        }
        return match first_difference(&old, &new)? {
            None => {
                eprintln!("replay matches {}", a.file.display());
                Ok(false)
            }
            Some(diff) => {
                eprintln!("replay differs from {}: {diff}", a.file.display());
                Ok(true)
            }
        };
    }
    let config = config_for(cli);
    let outcome = execute(&config, Exec::default())?;
    let text = outcome.report.render(config.global.format)?;
    write_output(config.global.out.as_deref(), &text)?;
    Ok(outcome.failed)
}
