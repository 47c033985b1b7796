//! CSV sink. Every float is written as `{:.16e}` (17 significant digits) so
//! identical inputs give byte-identical files.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use csv::{Terminator, WriterBuilder};

use crate::error::CliError;

pub struct CsvOut {
    writer: csv::Writer<Box<dyn Write>>,
}

impl CsvOut {
    /// Writes to `path`, or to standard output when `None`.
    pub fn open(path: Option<&Path>) -> Result<Self, CliError> {
        let sink: Box<dyn Write> = match path {
            Some(p) => Box::new(BufWriter::new(File::create(p)?)),
            None => Box::new(BufWriter::new(io::stdout())),
        };
        let writer = WriterBuilder::new().terminator(Terminator::Any(b'\n')).from_writer(sink);
        Ok(Self { writer })
    }

    pub fn header<S: AsRef<str>>(&mut self, columns: &[S]) -> Result<(), CliError> {
        self.writer.write_record(columns.iter().map(|c| c.as_ref()))?;
        Ok(())
    }

    pub fn row(&mut self, fields: &[String]) -> Result<(), CliError> {
        self.writer.write_record(fields)?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<(), CliError> {
        self.writer.flush()?;
        Ok(())
    }
}

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Empty field for a missing value.
pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// `steps` evenly spaced points from `start` to `end` inclusive.
pub fn linspace(start: f64, end: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..steps).map(|i| start + (end - start) * i as f64 / (steps - 1) as f64).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(num(0.1), "1.0000000000000001e-1");
        assert_eq!(num(0.0), "0.0000000000000000e0");
        assert_eq!(num(-2.5), "-2.5000000000000000e0");
    }

    #[test]
    fn linspace_hits_both_ends() {
        let g = linspace(0.0, 2.5, 500);
        assert_eq!(g.len(), 500);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[499], 2.5);
    }
}
