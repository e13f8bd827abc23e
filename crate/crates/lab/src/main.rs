use std::process::ExitCode;

use bfamily_lab::cli::Cli;
use bfamily_lab::{run, LabError};
use clap::Parser;

fn main() -> ExitCode {
    let outcome = Cli::parse().into_partial().and_then(|p| p.resolve()).and_then(|cfg| run(&cfg));
    match outcome {
        Ok(summary) => {
            println!("wrote {} files to {}", summary.outputs.len() + 1, summary.output.display());
            ExitCode::SUCCESS
        }
        Err(e) => report(e),
    }
}

fn report(e: LabError) -> ExitCode {
    eprintln!("error [{}]: {e}", e.category());
    ExitCode::from(e.exit_code() as u8)
}
