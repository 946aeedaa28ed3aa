//! Sweep harness for the `qca` command-line tool: grid specifications,
//! execution and deterministic CSV output.

pub mod cli;
pub mod error;
pub mod run;
pub mod runspec;

pub use error::{HarnessError, Result};
pub use run::{render, run, RunSummary};
pub use runspec::{Cell, Command, ConfigFile, Grid, RunSpec};
