//! `offlang` command-line tool: dataset preparation, model training,
//! evaluation, prediction and trivial baselines.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.

mod args;
mod commands;
mod config;

use std::fmt;

use clap::Parser;

pub use config::{ModelKind, Subtask};

/// A command failure carrying its process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Contradictory or missing flags, malformed config files: exit 1.
    Usage(String),
    /// Errors from the pipeline itself: exit 2, or 3 for numeric failures.
    Core(offlang_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Core(offlang_core::Error::Numeric(_)) => 3,
            CliError::Core(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<offlang_core::Error> for CliError {
    fn from(e: offlang_core::Error) -> Self {
        CliError::Core(e)
    }
}

/// Parse arguments, run the selected subcommand and return the exit code.
pub fn run() -> i32 {
    let cli = match args::Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version arrive here as non-error kinds
            use clap::error::ErrorKind;
            let ok = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let _ = e.print();
            return if ok { 0 } else { 1 };
        }
    };
    match commands::dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
