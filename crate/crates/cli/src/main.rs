mod args;
mod commands;
mod config;
mod csv;
mod error;

use std::process::ExitCode;

use clap::{CommandFactory, Parser};

use args::{Cli, Command};
use error::Result;

fn run(cli: &Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Solve(a) => commands::solve::run(a)?,
        Command::Figure(a) => commands::figure::run(a)?,
        Command::Verify(a) => {
            if !commands::verify::run(a)? {
                eprintln!("verification failed");
                return Ok(ExitCode::from(1));
            }
        }
        Command::ExitTime(a) => commands::exit_time::run(a)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.shows_usage() {
                let mut cmd = Cli::command();
                cmd.build();
                if let Some(sub) = cmd.find_subcommand_mut(cli.command.name()) {
                    eprintln!("\n{}", sub.render_usage());
                }
            }
            ExitCode::from(e.exit_code())
        }
    }
}
