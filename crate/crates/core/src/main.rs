use std::process::ExitCode;

use clap::Parser;

use fdisac::cli::{self, Cli};

fn main() -> ExitCode {
    cli::run(Cli::parse())
}
