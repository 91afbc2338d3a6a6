use std::process::ExitCode;

use clap::Parser;
use kicktomo::cli::{self, Args};

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { cli::EXIT_USAGE } else { cli::EXIT_OK });
        }
    };
    ExitCode::from(cli::run(&args, &mut std::io::stdout().lock(), &mut std::io::stderr().lock()))
}
