//! File formats, JSON reports and the commands behind the `optfilter` binary.
//!
//! Matrices travel as plain CSV (see [`csv_io`]); every command returns a
//! [`report::Report`] whose checks decide the exit status.

pub mod commands;
pub mod csv_io;
pub mod error;
pub mod report;

pub use error::CliError;
