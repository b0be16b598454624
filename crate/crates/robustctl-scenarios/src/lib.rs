//! Runnable scenarios for the `robustctl` toolkit, table generators for the
//! eigenvalue sweeps and writers for CSV, JSON and SVG output.
//!
//! Each [`ScenarioId`] reproduces one reference MATLAB script with the same
//! plant, gains, switching logic, stop predicates and literal defaults.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod emit;
pub mod matfile;
pub mod registry;
pub mod run;

pub use emit::{emit, emit_table, table_rows, Format};
pub use registry::{Defaults, Overrides, ScenarioId};
pub use run::{run_scenario, run_scenario_detailed, RunReport, ScenarioRun};

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
    #[error("invalid override `{0}`")]
    InvalidOverride(String),
    #[error("design failed: {0}")]
    Design(String),
    #[error(transparent)]
    Core(#[from] robustctl::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{path}:{line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },
}
