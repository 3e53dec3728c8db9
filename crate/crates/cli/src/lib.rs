//! Scenario runner for `causal-modes`: reads a TOML or JSON scenario, sweeps
//! one variable and writes one CSV per output column plus a resolved JSON
//! copy of the scenario.

pub mod error;
pub mod presets;
pub mod run;
pub mod scenario;
pub mod selftest;

pub use error::CliError;
pub use run::{evaluate_output, run_scenario, Row};
pub use scenario::Scenario;
