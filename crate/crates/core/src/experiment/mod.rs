//! Seed sweeps over curricula, aggregation and CSV reports.

mod config;
mod report;
mod runner;

pub use config::{parse_curricula, ConfigOverrides, ExperimentConfig, Seeds, CONFIG_KEYS, DEFAULT_LR, DEFAULT_RECALL};
pub use report::{
    aggregate_seeds, read_results_csv, read_trace_csv, round6, trace_from_csv, trace_to_csv, write_atomic,
    write_results_csv, write_trace_csv, ExperimentReport, ReportRow, TraceCsvRow, RESULTS_HEADER, TRACE_HEADER,
};
pub use runner::{
    aggregate_runs, check_config, run_experiment, write_outputs, ExperimentOutput, OutputFiles, RunRecord,
};

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::curriculum::TrainError;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("{0}")]
    Config(String),
    #[error("run `{curriculum}` seed {seed} failed: {source}")]
    Diverged {
        curriculum: String,
        seed: u64,
        #[source]
        source: TrainError,
    },
    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed file: {0}")]
    Format(String),
}

impl ExperimentError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        ExperimentError::Io { path: path.to_path_buf(), source }
    }
}
