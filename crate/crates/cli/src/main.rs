use std::process::ExitCode;

use clap::Parser;
use knightcount_cli::args::Cli;
use knightcount_cli::{run, verification_failures};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(report) => {
            println!("{}", report.to_json());
            let failures = verification_failures(&report);
            for f in &failures {
                eprintln!("mismatch: {f}");
            }
            if failures.is_empty() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
