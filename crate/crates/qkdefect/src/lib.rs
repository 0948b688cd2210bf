//! File formats, configuration, parallel kernel evaluation and the
//! experiment runner built on top of `qkdefect-core`.

pub mod config;
pub mod error;
pub mod io;
pub mod parallel;
pub mod report;
pub mod runner;

pub use config::{ConfigError, DatasetSource, ExperimentConfig, GridPoint, Mode};
pub use error::{Error, Result};
pub use report::{ExperimentReport, ReportFormat, ResultRow};
pub use runner::{run_experiment, validate};
