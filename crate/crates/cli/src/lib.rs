//! Command-line front end for the `membrane-cavity` library.
//!
//! Each subcommand maps onto one library operation. Tables are written as
//! CSV, results as a JSON [`report::RunReport`] on standard output.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod report;
pub mod table;

use std::io::Write;

use args::Cli;
use commands::{dispatch, Context};
use config::Config;
use error::CliError;

/// Runs a parsed command line, writing tables and the report.
///
/// With `--out` the table goes to that file and the report to standard
/// output. Without it the table itself is the standard output and the
/// report is not printed, so the stream stays valid CSV.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let config = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::parse("", "<no config>")?,
    };
    let ctx = Context {
        config,
        seed: cli.seed,
    };
    log::info!("running {}", cli.command.name());
    let output = dispatch(&cli.command, &ctx)?;
    for w in &output.report.warnings {
        log::warn!("{w}");
    }

    let stdout = std::io::stdout();
    match (&output.table, &cli.out) {
        (Some(table), Some(path)) => {
            table.write_file(path)?;
            log::info!("wrote {} rows to {}", table.rows.len(), path.display());
            print_report(&output.report, &cli.out)?;
        }
        (Some(table), None) => table.write_to(stdout.lock())?,
        (None, _) => print_report(&output.report, &cli.out)?,
    }
    match output.failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn print_report(
    report: &report::RunReport,
    out: &Option<std::path::PathBuf>,
) -> Result<(), CliError> {
    let mut report = report.clone();
    if let Some(path) = out {
        report.note("table", path.display());
    }
    let text = report.to_json()?;
    let mut stdout = std::io::stdout().lock();
    writeln!(stdout, "{text}")?;
    Ok(())
}
