//! Configuration-driven experiments: parse a TOML document, run one of the
//! pipelines, and collect the results as a CSV-ready table.

pub mod config;
pub mod random;
pub mod runner;
pub mod table;

pub use config::{validate, ExperimentConfig, ExperimentKind, Violation};
pub use runner::{run, summarize, RunError};
pub use table::{ResultTable, TableRow};
