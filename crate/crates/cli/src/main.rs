use std::process::ExitCode;

use clap::Parser;
use planargeo_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("planargeo {}: {e}", cli.command.name());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
