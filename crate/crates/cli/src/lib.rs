//! Experiment harness behind the `mlst` binary.

pub mod aggregate;
pub mod config;
pub mod experiment;

pub use aggregate::{aggregate, Summary};
pub use config::{Algo, ConfigError, ExperimentConfig};
pub use experiment::{read_csv, run_experiment, to_csv_string, write_csv, Record, HEADER};
