//! Scenario files, command dispatch and output formatting for the
//! `quasispec` binary.

pub mod commands;
pub mod emit;
pub mod error;
pub mod scenario;

pub use commands::{emit, run, Command, Format, Report, RunOptions};
pub use error::CliError;
pub use scenario::{parse_complex, parse_scenario, Scenario};
