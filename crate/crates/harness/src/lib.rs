//! Experiment runner for the CORE simulator: specification files, seeded
//! sweeps, CSV / JSON-lines reports and the acceptance self-test.

pub mod config;
pub mod experiment;
pub mod report;
pub mod selftest;

use std::path::PathBuf;

pub use config::{parse, render, ConfigError, ExperimentSpec};
pub use experiment::{builtin, load_spec, run_experiment};
pub use report::{emit_report, Format, ReportRow};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Protocol(#[from] core_qkd::ProtocolError),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0:?} is neither a readable file nor a built-in experiment")]
    UnknownSpec(String),
    #[error("unexpected report header {0:?}")]
    Header(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
