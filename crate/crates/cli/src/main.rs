use std::process::ExitCode;

use clap::Parser;
use relacc_cli::Cli;

fn main() -> ExitCode {
    match relacc_cli::run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
