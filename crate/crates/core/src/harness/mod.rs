//! Experiment orchestration: configuration files, multi-seed sweeps, CSV
//! output and the built-in property checks.

pub mod checks;
pub mod compare;
pub mod config;
pub mod trace_csv;

pub use checks::{run_checks, run_checks_with, CheckOptions, CheckReport};
pub use compare::{run_compare, run_sweep, run_sweep_with, HarnessError, SweepResult};
pub use config::{parse_config, parse_config_str, parse_with_overrides, ConfigError, ExperimentConfig, Variant};
pub use trace_csv::{read_trace_csv, write_trace_csv};
