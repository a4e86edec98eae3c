//! Front end for `relacc`: every subcommand writes plot-ready CSV plus a
//! `<out>.meta.txt` sidecar holding the inputs needed to reproduce it.

pub mod args;
pub mod commands;
pub mod csv;
pub mod meta;

use thiserror::Error;

pub use args::Cli;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Flag(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Numeric(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Flag(_) => 2,
            CliError::Data(_) | CliError::Io { .. } => 3,
            CliError::Numeric(_) => 4,
        }
    }
}

impl From<relacc::Error> for CliError {
    fn from(e: relacc::Error) -> Self {
        match e {
            relacc::Error::Data(_) => CliError::Data(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    commands::dispatch(cli.command)
}
