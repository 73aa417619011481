//! Number formatting, CSV tables and output destinations.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use crate::CliError;

/// Seventeen significant digits: enough to read back the exact double.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// CSV with a header row, comma separators and LF line endings.
pub fn csv_table(header: &[&str], rows: &[Vec<String>]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(row).map_err(csv_err)?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.into_error()))
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Io(io::Error::other(e))
}

/// `-` is standard output; anything else a file path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Destination {
    Stdout,
    File(PathBuf),
}

impl Destination {
    pub fn parse(arg: &Path) -> Self {
        if arg.as_os_str() == "-" {
            Destination::Stdout
        } else {
            Destination::File(arg.to_path_buf())
        }
    }

    pub fn with_extension(&self, ext: &str) -> Self {
        match self {
            Destination::Stdout => Destination::Stdout,
            Destination::File(p) => Destination::File(p.with_extension(ext)),
        }
    }

    pub fn write(&self, bytes: &[u8]) -> Result<(), CliError> {
        match self {
            Destination::Stdout => {
                let mut out = io::stdout().lock();
                out.write_all(bytes)?;
                out.flush()?;
            }
            Destination::File(p) => fs::write(p, bytes)
                .map_err(|e| CliError::Config(format!("cannot write {}: {e}", p.display())))?,
        }
        Ok(())
    }
}
