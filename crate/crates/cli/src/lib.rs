//! Command-line front end: simulations, exact solves, process oracles and
//! regime scans, writing CSV, JSON and SVG.

pub mod args;
pub mod commands;
pub mod output;

pub use args::{Cli, Command};

use std::fmt;

/// Exit status for usage and parameter errors.
pub const EXIT_USAGE: i32 = 2;
/// Exit status when a size or work budget would be exceeded.
pub const EXIT_CAPACITY: i32 = 3;
/// Exit status when a checked property fails.
pub const EXIT_VIOLATION: i32 = 4;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError { code: EXIT_USAGE, message: message.into() }
    }

    pub fn violation(message: impl Into<String>) -> Self {
        CliError { code: EXIT_VIOLATION, message: message.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<bulsol_core::Error> for CliError {
    fn from(e: bulsol_core::Error) -> Self {
        use bulsol_core::Error::*;
        let code = match e {
            Capacity(_) => EXIT_CAPACITY,
            NonConvergence { .. } => EXIT_VIOLATION,
            _ => EXIT_USAGE,
        };
        CliError { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::usage(format!("i/o error: {e}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::usage(format!("csv error: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::usage(format!("json error: {e}"))
    }
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Simulate(a) => commands::simulate(a),
        Command::Exact(a) => commands::exact(a),
        Command::Oracle(o) => commands::oracle(o),
        Command::Regimes(a) => commands::regimes(a),
    }
}
