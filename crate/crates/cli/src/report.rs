//! Report rendering. Computed values are rounded to 12 significant digits;
//! echoed inputs are written at full precision so a report can be replayed.

use std::fs;
use std::io::Write;
use std::path::Path;

use clap::ValueEnum;
use serde::{Serialize, Serializer};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

pub fn round_sig(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    format!("{v:.11e}").parse().expect("formatted float parses")
}

pub fn sig<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(round_sig(*v))
}

pub fn sig_vec<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| round_sig(*x)))
}

pub fn sig_opt<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.serialize_some(&round_sig(*v)),
        None => s.serialize_none(),
    }
}

pub fn cell(v: f64) -> String {
    round_sig(v).to_string()
}

/// A report with a JSON form and a flat tabular form.
pub trait Report: Serialize {
    fn header(&self) -> Vec<String>;
    fn rows(&self) -> Vec<Vec<String>>;

    fn default_format(&self) -> Format {
        Format::Json
    }
}

pub fn header(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn render<R: Report>(report: &R, format: Format) -> Result<Vec<u8>, CliError> {
    match format {
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(report).map_err(|e| CliError::Output(e.to_string()))?;
            out.push(b'\n');
            Ok(out)
        }
        Format::Csv => {
            let mut writer = csv::Writer::from_writer(Vec::new());
            writer
                .write_record(report.header())
                .map_err(|e| CliError::Output(e.to_string()))?;
            for row in report.rows() {
                writer.write_record(row).map_err(|e| CliError::Output(e.to_string()))?;
            }
            writer.into_inner().map_err(|e| CliError::Output(e.to_string()))
        }
    }
}

pub fn emit<R: Report>(report: &R, format: Option<Format>, output: Option<&Path>) -> Result<(), CliError> {
    let bytes = render(report, format.unwrap_or_else(|| report.default_format()))?;
    match output {
        Some(path) => fs::write(path, bytes).map_err(|e| CliError::Output(format!("{}: {e}", path.display()))),
        None => std::io::stdout()
            .lock()
            .write_all(&bytes)
            .map_err(|e| CliError::Output(e.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(round_sig(0.038550526870925236), 0.0385505268709);
        assert_eq!(round_sig(2.0300000000000002), 2.03);
        assert_eq!(round_sig(-123456789.12345679), -123456789.123);
        assert_eq!(round_sig(0.0), 0.0);
        assert!(round_sig(f64::NAN).is_nan());
        assert_eq!(cell(1.0 / 3.0), "0.333333333333");
    }
}
