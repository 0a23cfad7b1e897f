//! Configuration, presets, snapshot and summary files, and the run driver
//! around [`sheath_core`].

#![allow(clippy::result_large_err)]

pub mod config;
pub mod presets;
pub mod runner;
pub mod snapshot;
pub mod summary;

use std::path::PathBuf;

pub use config::{parse_config, parse_config_with_overrides, Checks, RunConfig};
pub use runner::{execute, simulate, Execution};
pub use snapshot::{read_snapshot, write_snapshot, Snapshot};
pub use summary::{write_summary, CheckResult, RunStatus, RunSummary};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("override `{spec}`: {message}")]
    Override { spec: String, message: String },
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}:{line}: {message}", path.display())]
    Snapshot { path: PathBuf, line: usize, message: String },
}

impl Error {
    /// Problems with the configuration itself, as opposed to the run.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Parse { .. } | Error::Invalid(_) | Error::Override { .. } | Error::UnknownPreset(_))
    }
}
