use std::process::ExitCode;

use clap::Parser;
use mongeampere::cli::{run, Cli, EXIT_ERROR};

fn main() -> ExitCode {
    match Cli::try_parse() {
        Ok(cli) => ExitCode::from(run(&cli)),
        Err(e) => {
            let _ = e.print();
            // --help and --version are not errors.
            ExitCode::from(if e.use_stderr() { EXIT_ERROR } else { 0 })
        }
    }
}
