use std::process::ExitCode;

use clap::Parser;
use yb_lab::{execute, Cli, EXIT_CONFIG};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG as u8 } else { 0 });
        }
    };
    let code = execute(cli, &mut std::io::stdout(), &mut std::io::stderr());
    ExitCode::from(code as u8)
}
