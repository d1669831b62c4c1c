//! `grotto` command-line tool.

mod args;
mod commands;
mod input;

use std::fs;
use std::process::ExitCode;

use clap::Parser;

use args::Cli;
use input::CliError;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("grotto: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn execute(cli: &Cli) -> Result<u8, CliError> {
    let report = commands::run(&cli.command, &cli.inputs)?;
    let mut text = serde_json::to_string_pretty(&report).expect("reports serialize");
    text.push('\n');
    match &cli.inputs.out {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io { path: path.clone(), source })?,
        None => print!("{text}"),
    }
    Ok(if report.failed { 1 } else { 0 })
}
