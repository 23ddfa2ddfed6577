mod args;
mod commands;
mod config;
mod report;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use commands::Outcome;
use config::InputError;

fn run(cli: Cli) -> Result<Outcome, InputError> {
    match cli.command {
        Command::Analyze(a) => commands::analyze(&config::analyze_config(&a)?),
        Command::Hull(h) => commands::hull(&h),
        Command::Crosscheck(c) => {
            let (corpus, engine) = config::crosscheck_config(&c)?;
            commands::run_crosscheck(corpus.as_deref(), &engine)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{}", out.stdout);
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(3)
        }
    }
}
