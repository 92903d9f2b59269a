mod args;
mod commands;
mod report;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Count(args) => commands::count(&args),
        Command::ClosedForm(args) => commands::closed_form(&args),
        Command::Sample(args) => commands::sample(&args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("treebag: {failure}");
            ExitCode::from(failure.code())
        }
    }
}
