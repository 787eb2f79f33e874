mod args;
mod commands;
mod config;

use std::process::ExitCode;

use clap::Parser;

use args::Cli;
use commands::{Context, Failure};

const THREADS_VAR: &str = "BINAQ_THREADS";

fn threads_from_env() -> Result<Option<usize>, Failure> {
    match std::env::var(THREADS_VAR) {
        Ok(v) if v.trim().is_empty() => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Failure::Usage(format!(
                "{THREADS_VAR} must be a positive integer, got '{v}'"
            ))),
        },
        Err(_) => Ok(None),
    }
}

fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
}

fn run() -> Result<(), Failure> {
    let argv = config::merge_config(std::env::args_os().collect()).map_err(Failure::Usage)?;
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                Err(Failure::Usage(String::new()))
            } else {
                Ok(())
            };
        }
    };
    init_logging(cli.verbose);
    let threads = threads_from_env()?;
    if let Some(n) = threads {
        binaq::harness::limit_global_workers(n)?;
    }
    commands::run(cli.command, &Context { threads })
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            let text = failure.to_string();
            if !text.is_empty() {
                eprintln!("error: {text}");
            }
            ExitCode::from(failure.exit_code())
        }
    }
}
