//! File formats and the `envarkit` command-line front end for
//! [`envarkit_core`].
//!
//! Reports are JSON by default; `--format text` renders the same fields as
//! `key: value` lines. Exit codes: 0 success, 1 valid input with a negative
//! verdict, 2 input error.

pub mod cli;
pub mod error;
pub mod formats;

pub use cli::{run, Cli, Command, Format, Outcome, RunConfig};
pub use error::CliError;
