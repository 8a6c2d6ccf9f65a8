//! Suite runner behind the `lwmy` binary.

pub mod config;
pub mod report;
pub mod suites;

pub use config::{ConfigError, ExperimentConfig};
pub use report::{CheckSummary, SuiteReport};
pub use suites::{run_suite, Suite};
