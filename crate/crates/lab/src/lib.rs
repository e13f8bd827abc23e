//! Configuration, file formats and the command line driver for
//! [`bfamily_core`].
//!
//! Every run writes its reports and a `manifest.json` holding the fully
//! resolved configuration into one output directory. Passing that manifest
//! back as `--config` repeats the run; all reports except the manifest's
//! timing are byte-identical.

pub mod cli;
pub mod config;
pub mod error;
pub mod io;
pub mod report;
pub mod run;

pub use config::{Command, PartialConfig, RunConfig};
pub use error::{LabError, LabResult};
pub use run::{run, RunSummary};
