//! Command-line front end: verification suite, evolution runs, parameter scans
//! and spectra, driven by a strict JSON config.

pub mod config;
pub mod error;
pub mod evolve;
pub mod output;
pub mod scan;
pub mod spectrum;
pub mod verify;

pub use config::{Overrides, RunConfig};
pub use error::CliError;
