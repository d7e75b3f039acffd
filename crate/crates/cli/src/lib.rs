//! Command-line front end: circuit files, repeater scenarios and the
//! datasets behind the published figures.

pub mod circuit;
pub mod config;
pub mod error;
pub mod reproduce;
pub mod verify;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use ept_core::DEFAULT_DENSE_CAP;

pub use error::{CliError, Result};

/// Environment variable overriding the dense-table cap.
pub const DENSE_CAP_VAR: &str = "EPT_DENSE_CAP";

#[derive(Debug, Parser)]
#[command(
    name = "ept",
    version,
    about = "Error probability tensors for qudit Clifford circuits"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Propagate a circuit file and print the final tensor as CSV.
    Run { circuit: PathBuf },
    /// Evaluate a repeater scenario; prints a JSON summary.
    Repeater {
        config: PathBuf,
        /// Also write the coset table as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Emit the dataset behind a figure or table as CSV.
    Reproduce {
        target: reproduce::Target,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run built-in self-checks.
    Verify {
        #[arg(long)]
        suite: Option<verify::Suite>,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

/// The dense cap from [`DENSE_CAP_VAR`], or the library default.
pub fn dense_cap_from(value: Option<&str>) -> Result<u128> {
    match value {
        None => Ok(DEFAULT_DENSE_CAP),
        Some(v) => match v.trim().parse::<u128>() {
            Ok(cap) if cap > 0 => Ok(cap),
            _ => Err(CliError::DenseCap(v.to_owned())),
        },
    }
}

pub fn execute<W: Write>(cli: &Cli, dense_cap: u128, stdout: &mut W) -> Result<()> {
    let io_err = |source| CliError::Io {
        path: PathBuf::from("<stdout>"),
        source,
    };
    match &cli.command {
        Command::Run { circuit } => {
            let program = circuit::parse_circuit(&read(circuit)?)?;
            let out = circuit::run_circuit(&program, dense_cap)?;
            stdout.write_all(out.to_csv().as_bytes()).map_err(io_err)?;
        }
        Command::Repeater { config, csv } => {
            let cfg = config::RepeaterConfig::parse(&read(config)?)?;
            let (summary, stats) = config::run_repeater(&cfg)?;
            let json = serde_json::to_string_pretty(&summary)
                .map_err(|e| CliError::Config(e.to_string()))?;
            writeln!(stdout, "{json}").map_err(io_err)?;
            if let Some(path) = csv {
                write_file(path, stats.to_csv().as_bytes())?;
            }
        }
        Command::Reproduce { target, out } => match out {
            Some(path) => {
                let mut buf = Vec::new();
                reproduce::reproduce(*target, &mut buf)?;
                write_file(path, &buf)?;
            }
            None => reproduce::reproduce(*target, &mut *stdout)?,
        },
        Command::Verify { suite } => {
            let checks = verify::verify(*suite)?;
            let mut failed = Vec::new();
            for c in &checks {
                let status = if c.pass { "PASS" } else { "FAIL" };
                writeln!(stdout, "{status} {}: {}", c.name, c.detail).map_err(io_err)?;
                if !c.pass {
                    failed.push(c.name.clone());
                }
            }
            if !failed.is_empty() {
                return Err(CliError::Verification(failed.join(", ")));
            }
        }
    }
    Ok(())
}
