use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = delsarte_cli::Cli::parse();
    match delsarte_cli::run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {:#}", failure.error);
            ExitCode::from(failure.code)
        }
    }
}
