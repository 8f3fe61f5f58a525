//! Scenario files, the task runner and deterministic JSON reports for the
//! `hochlab` command-line tool.

pub mod cli;
pub mod report;
pub mod scenario;
pub mod tasks;

pub use report::{run_scenario, summary, RunOptions, RunOutcome};
pub use scenario::Scenario;
