//! Command-line front end for `qaoa-calc`: instance ingestion, analysis subcommands and CSV output.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod io;

use std::io::Write;

use args::{Cli, Command};
use error::CliResult;

/// Runs a parsed command line, writing results to `out` and diagnostics to `err`.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<()> {
    let file = cli.config.as_deref().map(config::load).transpose()?;
    let file = file.as_ref();
    let section = cli.command.name();
    match &cli.command {
        Command::Expectation(a) => commands::expectation::run(&config::merge(a, file, section)?, out, err),
        Command::Sweep(a) => commands::sweep::run(&config::merge(a, file, section)?, out, err),
        Command::Verify(a) => commands::verify::run(&config::merge(a, file, section)?, out, err),
        Command::Sample(a) => commands::sample::run(&config::merge(a, file, section)?, out, err),
        Command::Gradients(a) => commands::gradients::run(&config::merge(a, file, section)?, out, err),
        Command::Lightcone(a) => commands::lightcone::run(&config::merge(a, file, section)?, out, err),
        Command::Generate(a) => commands::generate::run(&config::merge(a, file, section)?, out, err),
    }
}

/// Caps the worker pool at `QAOA_CALC_THREADS` when set.
pub fn configure_threads() -> CliResult<()> {
    if let Ok(v) = std::env::var("QAOA_CALC_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| error::CliError::Input(format!("QAOA_CALC_THREADS must be a positive integer, got {v:?}")))?;
        if n == 0 {
            return Err(error::CliError::Input("QAOA_CALC_THREADS must be positive".into()));
        }
        // A pool may already exist when embedded; the cap then stays as it was.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}
