use std::process::ExitCode;

use clap::Parser;

mod args;
mod commands;
mod export;
mod failure;
mod input;
mod report;

use args::{Cli, Command};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Pairwise(a) => commands::pairwise(a),
        Command::Group(a) => commands::group(a),
        Command::Compare(a) => commands::compare(a),
        Command::Decompose(a) => commands::decompose(a),
        Command::Bootstrap(a) => commands::bootstrap(a),
        Command::Zcurve(a) => commands::zcurve(a),
        Command::Export(a) => commands::export(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
