//! Command-line driver: dataset ingestion, index build and query, benchmark
//! scenarios, the memory-wall calculator and the self-verification suite.

pub mod commands;
pub mod datafile;
pub mod error;

pub use commands::{run, Cli, Command};
pub use error::CliError;
