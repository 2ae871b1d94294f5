//! `gdiscord` command-line tool.

mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::Parser;

use config::{Cli, RunConfig};

/// Errors surfaced to the shell.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, unreadable or malformed input.
    Input(String),
    /// Errors from the library.
    Core(gdiscord::Error),
    /// `oracle-check` ran but exceeded its tolerance.
    CheckFailed(String),
}

impl From<gdiscord::Error> for CliError {
    fn from(e: gdiscord::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_unphysical() => 2,
            _ => 1,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Input(msg) | CliError::CheckFailed(msg) => msg.clone(),
            CliError::Core(e) if e.is_unphysical() => {
                let msg = e.to_string();
                if msg.starts_with("unphysical") {
                    msg
                } else {
                    format!("unphysical: d_minus < 1/2 ({msg})")
                }
            }
            CliError::Core(e) => e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn,gdiscord::channels=error"))
        .format_timestamp(None)
        .init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(1),
            };
        }
    };

    let result = RunConfig::from_cli(cli).and_then(|cfg| commands::run(&cfg));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
