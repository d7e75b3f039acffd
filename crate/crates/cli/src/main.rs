use std::process::ExitCode;

use clap::Parser;
use ept_cli::{dense_cap_from, execute, Cli, DENSE_CAP_VAR};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let var = std::env::var(DENSE_CAP_VAR).ok();
    let result = dense_cap_from(var.as_deref())
        .and_then(|cap| execute(&cli, cap, &mut std::io::stdout().lock()));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
