//! Command-line surface for `toeplitz-core`: spec files, reports and the
//! `toeplitz` subcommands.

pub mod commands;
pub mod report;
pub mod specfile;

pub use commands::{run, Cli, Outcome};
pub use specfile::{parse_spec, SpecFile};
