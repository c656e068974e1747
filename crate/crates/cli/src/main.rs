use std::process::ExitCode;

use clap::Parser;
use rankaug_cli::args::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match rankaug_cli::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
