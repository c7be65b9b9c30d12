use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    phasefield_cli::execute(phasefield_cli::Cli::parse())
}
