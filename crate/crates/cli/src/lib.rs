//! Command-line front end for `polyzeta`.
//!
//! `run` parses arguments, resolves the configuration, runs one subcommand
//! and returns the process exit status: 0 on success, 1 when an invariant
//! check fails, 2 on bad input.

pub mod commands;
pub mod config;
pub mod error;
pub mod table;
pub mod validate;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

use crate::config::{Cli, Command, Format, RunConfig, SEED_VAR};
use crate::error::{CliError, CliResult, EXIT_INPUT, EXIT_INVARIANT, EXIT_OK};
use crate::table::table_json;

/// Runs the CLI on `args` (program name first) and returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("polyzeta: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli) -> CliResult<i32> {
    let seed = std::env::var(SEED_VAR).ok();
    let cfg = RunConfig::resolve(Command::from(cli.command), &cli.overrides, seed)?;
    let (text, code) = match cfg.command {
        Command::Zeros | Command::Count | Command::Spectrum => {
            let table = match cfg.command {
                Command::Zeros => commands::cmd_zeros(&cfg)?,
                Command::Count => commands::cmd_count(&cfg)?,
                _ => commands::cmd_spectrum(&cfg)?,
            };
            let text = match cfg.format {
                Format::Csv => table.to_csv(),
                Format::Json => table_json(&table, &cfg),
            };
            (text, EXIT_OK)
        }
        Command::Validate => {
            let report = validate::run_validation(&cfg)?;
            let text = match cfg.format {
                Format::Json => validate::report_json(&report),
                Format::Csv => validate::report_table(&report).to_csv(),
            };
            if !report.passed {
                let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.id).collect();
                eprintln!("polyzeta: {}", CliError::Invariant(format!("failed checks: {}", failed.join(", "))));
            }
            (text, if report.passed { EXIT_OK } else { EXIT_INVARIANT })
        }
    };
    match &cfg.out {
        Some(path) => std::fs::write(path, text)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(code)
}
