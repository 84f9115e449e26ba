//! Experiment runner for sharp Bernstein–Nikolskii constants: flag and
//! config-file parsing, sweeps, CSV tables and run manifests.

pub mod config;
pub mod operator;
pub mod output;
pub mod run;
pub mod sweep;

pub use config::{expand_config, Cli, Command, ExperimentConfig, ExperimentKind, FunctionChoice};
pub use operator::{operator_parse, operator_spec};
pub use run::{execute, run, ConstantRow, LevitanRow, RunOutput, RunSummary, Table};
pub use sweep::{Spacing, Sweep};
