use std::io;
use std::process::ExitCode;

use clap::Parser;

use metric_balls::cli::{exit_code, run, Cli, Outcome, EXIT_VIOLATION};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    match run(cli, &mut stdout.lock()) {
        Ok(Outcome::Clean) => ExitCode::SUCCESS,
        Ok(Outcome::Violations) => ExitCode::from(EXIT_VIOLATION as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
