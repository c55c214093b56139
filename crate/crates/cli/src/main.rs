use std::process::ExitCode;

use clap::error::ErrorKind;
use induction_cli::{parse_args, render_error_table, run};

fn main() -> ExitCode {
    let cfg = match parse_args(std::env::args_os()) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(&cfg) {
        Ok(summary) => {
            if !summary.records.is_empty() {
                print!("{}", render_error_table(&summary.records));
            }
            for f in &summary.files {
                eprintln!("wrote {}", f.display());
            }
            for msg in &summary.failures {
                eprintln!("unstable: {msg}");
            }
            if summary.failures.is_empty() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
