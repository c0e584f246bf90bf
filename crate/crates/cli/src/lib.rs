//! Configuration, experiments, sweeps and output files for the cavity-QED
//! photon pair simulator. The binary in `main.rs` is a thin layer over this.

pub mod checks;
pub mod config;
pub mod experiment;
pub mod format;
pub mod svg;
pub mod sweep;

pub use config::{validate_config, ConfigError, ExperimentConfig, Method, Scheme};
pub use experiment::{run_experiment, write_run, RunError, RunResult, Summary};
pub use sweep::{run_sweep, write_sweep, SweepResult, SweepRow};
