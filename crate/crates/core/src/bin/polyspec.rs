use std::io::Write;
use std::process::ExitCode;

use polyspec::cli::{run_from, CliError};

// A closed pipe (e.g. `| head`) is not an error worth a panic.
fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn main() -> ExitCode {
    match run_from(std::env::args_os()) {
        Ok(report) => {
            emit(&report.stdout);
            ExitCode::SUCCESS
        }
        Err(CliError::Usage(e)) if !e.use_stderr() => {
            // --help and --version
            emit(&e.to_string());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.line());
            ExitCode::from(2)
        }
    }
}
