//! Configuration, the verify suite and CSV reporting for the `suplab`
//! command-line tool.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod output;
pub mod run;
pub mod verify;

pub use config::{parse_config, ConfigError, RunConfig};
pub use output::RunManifest;
pub use run::{run, Command, Outcome, RunError};
