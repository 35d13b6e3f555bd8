//! Output plumbing shared by the subcommands.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use crate::error::CliError;

/// 17 significant digits, enough for a lossless f64 round trip.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Opens the configured output file, or standard output when none is set.
pub fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}
