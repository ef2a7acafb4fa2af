//! Driver behind the `goe-charpoly` binary.

pub mod commands;
pub mod config;
pub mod record;
pub mod suites;

use std::fmt;
use std::path::PathBuf;

use config::{Command, RunConfig};
use record::Artifacts;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VERIFY_FAILED: i32 = 2;

/// Bad input, reported with the offending field.
#[derive(Debug, Clone, PartialEq)]
pub struct UsageError {
    pub field: String,
    pub message: String,
}

impl UsageError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid {}: {}", self.field, self.message)
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(UsageError),
    Compute(goe_charpoly::Error),
    Output(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(e) => e.fmt(f),
            CliError::Compute(goe_charpoly::Error::Domain { name, value, expected }) => {
                write!(f, "invalid {name}: {value} (expected {expected})")
            }
            CliError::Compute(e) => e.fmt(f),
            CliError::Output(e) => write!(f, "cannot write output: {e}"),
        }
    }
}

impl From<UsageError> for CliError {
    fn from(e: UsageError) -> Self {
        CliError::Usage(e)
    }
}

impl From<goe_charpoly::Error> for CliError {
    fn from(e: goe_charpoly::Error) -> Self {
        CliError::Compute(e)
    }
}

fn flags(command: &Command) -> (&config::Flags, &'static str) {
    match command {
        Command::Estimate(f) => (f, "estimate"),
        Command::Eval(f) => (f, "eval"),
        Command::Oracle(f) => (f, "oracle"),
        Command::Verify(f) => (f, "verify"),
        Command::SampleSpectra(f) => (f, "sample-spectra"),
    }
}

/// Runs one command and returns its artifacts and output prefix without
/// writing anything.
pub fn execute(command: &Command) -> Result<(Artifacts, Option<PathBuf>), CliError> {
    let (flags, kind) = flags(command);
    let cfg = RunConfig::from_flags(flags.clone())?;
    let body = || match kind {
        "estimate" => commands::estimate(&cfg),
        "eval" => commands::eval(&cfg),
        "oracle" => commands::oracle(&cfg),
        "verify" => suites::verify(&cfg),
        _ => commands::sample_spectra(&cfg),
    };
    let artifacts = match cfg.workers {
        Some(w) => goe_charpoly::estimators::with_workers(w, body)??,
        None => body()?,
    };
    Ok((artifacts, cfg.out.clone()))
}

/// Runs one command, writes its artifacts and returns the exit status.
pub fn run(command: &Command) -> i32 {
    let (artifacts, out) = match execute(command) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    if let Err(e) = artifacts.write(out.as_deref()) {
        eprintln!("error: {}", CliError::Output(e));
        return EXIT_USAGE;
    }
    if out.is_none() && artifacts.tables.iter().any(|(_, t)| t.rows() > 1) {
        eprintln!("note: CSV output skipped; pass --out PREFIX to write it");
    }
    for v in artifacts.record.verdicts.iter().filter(|v| !v.pass) {
        eprintln!("FAIL {}: measured {} vs tolerance {}", v.name, v.measured, v.tolerance);
    }
    if artifacts.record.passed() {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAILED
    }
}
