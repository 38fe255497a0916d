//! Configuration files, on-disk formats and the experiment catalog.

pub mod config;
pub mod experiments;
pub mod output;
pub mod snapshot;

pub use config::{parse_config, ExperimentConfig};
pub use experiments::{list_presets, resolve, run_experiment, Experiment, ExperimentSummary};
pub use snapshot::{load_snapshot, read_snapshot, save_snapshot, write_snapshot};
