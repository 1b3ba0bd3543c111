//! Command-line front end for `seqdict`: instance files, runs, PoSD reports,
//! verification suites and CSV benchmarks.

pub mod bench;
pub mod gen;
pub mod instance;
pub mod report;
pub mod run;
pub mod verify;

use seqdict::Caps;

pub const CAPS_ENV: &str = "SEQDICT_CAPS";

/// Exit status for a verification failure; usage and input errors use 2.
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("instance file: {0}")]
    Format(String),
    #[error(transparent)]
    Core(#[from] seqdict::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

/// Defaults overridden by `SEQDICT_CAPS`, e.g. `factorial=8,monotone=5`.
pub fn caps_from_env() -> Result<Caps, CliError> {
    match std::env::var(CAPS_ENV) {
        Ok(s) if !s.trim().is_empty() => s
            .parse()
            .map_err(|e: seqdict::Error| CliError::Usage(format!("{CAPS_ENV}: {e}"))),
        _ => Ok(Caps::default()),
    }
}
