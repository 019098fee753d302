use std::process::ExitCode;

use clap::Parser;
use magrep::{run_from_args, Args};

fn main() -> ExitCode {
    let args = Args::parse();
    match run_from_args(&args) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
