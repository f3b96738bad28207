//! Coverage, rate and MGF experiments over the `udn_rate` library, written as
//! CSV tables.

pub mod config;
pub mod error;
pub mod experiment;

pub use config::{default_spec, parse_config, parse_config_str, ExperimentKind, ExperimentSpec, MgfSettings};
pub use error::CliError;
pub use experiment::{apply_overrides, run_experiment, simulate_samples, write_csv, Overrides, RunOptions, Table};
