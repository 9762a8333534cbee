//! `ringflow` command-line frontend.
//!
//! Exit codes: 0 success, 1 I/O error, 2 invalid input, 3 solver failure,
//! 4 a check failed, 5 branch truncated (partial output is still written).

mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::Cli;
use commands::{Invalid, Status};

pub const EXIT_IO: u8 = 1;
pub const EXIT_SPEC: u8 = 2;
pub const EXIT_SOLVER: u8 = 3;
pub const EXIT_CHECK: u8 = 4;
pub const EXIT_TRUNCATED: u8 = 5;

fn exit_code(err: &anyhow::Error) -> u8 {
    use ringflow::Error as E;
    for cause in err.chain() {
        if cause.downcast_ref::<Invalid>().is_some() {
            return EXIT_SPEC;
        }
        if let Some(e) = cause.downcast_ref::<E>() {
            return match e {
                E::Io(_) | E::Csv(_) => EXIT_IO,
                E::Json(_)
                | E::Domain(_)
                | E::Range(_)
                | E::InvalidDomain(_)
                | E::Precondition(_)
                | E::Threshold(_) => EXIT_SPEC,
                E::Inconsistent(_) => EXIT_CHECK,
                _ => EXIT_SOLVER,
            };
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return EXIT_IO;
        }
    }
    EXIT_IO
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::ChecksFailed) => ExitCode::from(EXIT_CHECK),
        Ok(Status::Truncated) => ExitCode::from(EXIT_TRUNCATED),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
