use std::process::ExitCode;

use clap::Parser;

use petviashvili_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            println!("{report}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("petvi: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
