use std::io::Write;
use std::process::ExitCode;

use nsphere::cli::{execute, parse, CliError};

fn main() -> ExitCode {
    let outcome = match parse(std::env::args_os()) {
        Ok(plan) => execute(&plan),
        Err(CliError::Help(text)) => {
            print!("{text}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{}", e.message());
            if !e.message().ends_with('\n') {
                eprintln!();
            }
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let _ = std::io::stdout().write_all(outcome.stdout.as_bytes());
    let _ = std::io::stderr().write_all(outcome.stderr.as_bytes());
    ExitCode::from(outcome.code as u8)
}
