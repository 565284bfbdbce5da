//! Configuration, orchestration and artifacts for the verification
//! experiments. Each subcommand of the `exctime` binary maps to one module.

pub mod cli;
pub mod config;
pub mod error;
pub mod limits;
pub mod output;
pub mod plot;
pub mod run;
pub mod simulate;
pub mod structure;

pub use config::ExperimentConfig;
pub use error::{Error, Result};
