//! Scenario-driven command line front end.
//!
//! `kicktomo <command> --config <file> [--out <dir>]`. Without `--out` the CSV
//! goes to stdout; with it, files are named `<scenario>.<command>.csv`.
//! `verify` runs the default scenario matrix when no config is given.
//!
//! Exit codes: 0 success, 1 usage or config error, 2 verification failure.

pub mod commands;
pub mod scenario;
pub mod verify;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};

use scenario::{Artifact, ConfigError, Scenario};

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_VERIFY_FAILED: u8 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Trajectory,
    Moments,
    Tomogram,
    Squeezing,
    Verify,
}

impl Command {
    fn artifact(self) -> Option<Artifact> {
        match self {
            Command::Trajectory => Some(Artifact::Trajectory),
            Command::Moments => Some(Artifact::Moments),
            Command::Tomogram => Some(Artifact::Tomogram),
            Command::Squeezing => Some(Artifact::Squeezing),
            Command::Verify => None,
        }
    }
}

/// Kicked Caldirola-Kanai oscillator: trajectories, moments, tomograms.
#[derive(Debug, Parser)]
#[command(name = "kicktomo", version)]
pub struct Args {
    #[arg(value_enum)]
    pub command: Command,

    /// Scenario file (`key = value` lines); optional for `verify`.
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Directory for output files; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Verify,
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<crate::Error> for Failure {
    fn from(e: crate::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::Usage(format!("{}: {e}", path.display()))
}

fn load(path: &Path) -> Result<Scenario, Failure> {
    let text = fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("scenario");
    Scenario::parse(name, &text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn write_file(dir: &Path, name: &str, body: &str) -> Result<PathBuf, Failure> {
    fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))?;
    let path = dir.join(name);
    fs::write(&path, body).map_err(|e| io_failure(&path, e))?;
    Ok(path)
}

/// A closed pipe (`kicktomo ... | head`) is not an error.
fn emit(stdout: &mut dyn Write, text: &str) -> Result<(), Failure> {
    match stdout.write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Failure::Usage(format!("stdout: {e}"))),
        _ => Ok(()),
    }
}

fn execute(args: &Args, stdout: &mut dyn Write) -> Result<(), Failure> {
    match args.command.artifact() {
        Some(artifact) => {
            let path = args
                .config
                .as_deref()
                .ok_or_else(|| Failure::Usage(format!("`{}` needs --config <file>", artifact.name())))?;
            let s = load(path)?;
            let csv = commands::render(&s, artifact)?;
            match &args.out {
                Some(dir) => {
                    let written = write_file(dir, &format!("{}.{}.csv", s.name, artifact.name()), &csv)?;
                    emit(stdout, &format!("wrote {}\n", written.display()))?;
                }
                None => emit(stdout, &csv)?,
            }
            Ok(())
        }
        None => {
            let scenarios = match &args.config {
                Some(path) => vec![load(path)?],
                None => verify::default_matrix(),
            };
            let report = verify::verify_all(&scenarios);
            let table = report.table();
            emit(stdout, &table)?;
            if let Some(dir) = &args.out {
                write_file(dir, "verify.txt", &table)?;
                for s in &scenarios {
                    for &artifact in &s.outputs {
                        let csv = commands::render(s, artifact)?;
                        write_file(dir, &format!("{}.{}.csv", s.name, artifact.name()), &csv)?;
                    }
                }
            }
            if report.passed() {
                Ok(())
            } else {
                Err(Failure::Verify)
            }
        }
    }
}

/// Runs one invocation and returns the process exit code.
pub fn run(args: &Args, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8 {
    match execute(args, stdout) {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "kicktomo: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Verify) => {
            let _ = writeln!(stderr, "kicktomo: verification failed");
            EXIT_VERIFY_FAILED
        }
    }
}
