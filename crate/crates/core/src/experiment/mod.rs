//! Experiment harness: configuration ingestion, seeded channel realizations,
//! scenario sweeps, and CSV emission.

mod channels;
mod config;
mod csv;
mod sweep;

pub use channels::{fading_draws, sample_channels};
pub use config::{ChannelMode, ExperimentConfig, Scenario, SweepConfig, UserConfig};
pub use csv::{parse_csv, render_csv, write_csv, CSV_HEADER};
pub use sweep::{is_error_termination, run_experiment, ResultRow};
