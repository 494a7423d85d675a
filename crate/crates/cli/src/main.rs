use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use stable_cluster::commands::{execute, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = match execute(cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let written = match &report.out {
        Some(path) => std::fs::write(path, &report.body).map_err(|e| format!("{}: {e}", path.display())),
        None => std::io::stdout().write_all(report.body.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(report.status as u8)
}
