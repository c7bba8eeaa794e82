//! Experiment presets, configuration, and output plumbing for the srion
//! command-line tool.

pub mod config;
pub mod csvout;
pub mod driver;
pub mod error;
pub mod experiments;
pub mod manifest;

pub use config::Config;
pub use error::CliError;
pub use experiments::ExperimentKind;
