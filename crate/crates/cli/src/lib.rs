//! Command-line front end: state and ensemble files, reports, verification
//! suites and CSV sweeps.

pub mod app;
pub mod error;
pub mod files;
pub mod measure;
pub mod report;
pub mod sweep;
pub mod verify;

pub use app::{main_with_args, run, Cli, Command};
pub use error::CliError;
pub use files::{EnsembleFile, StateFile};
pub use report::Report;
