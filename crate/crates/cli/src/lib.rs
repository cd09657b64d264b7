//! Configuration, command runners and report emission for the `tlab` tool.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;

pub use commands::run;
pub use config::{parse_config, AlphaSpec, Command, ScanConfig};
pub use error::{CliError, EXIT_INVARIANT, EXIT_OK, EXIT_PRECONDITION};
pub use report::ReportBundle;
