//! File formats: score matrices (CSV or JSON), weight matrices (CSV), gain
//! tables and explicit set-function tables (JSON), partial orders (JSON),
//! discount profiles (JSON array or `log2`) and permutations (JSON array or
//! comma-separated text).
//!
//! CSV input is comma-separated UTF-8 with LF or CRLF line endings. A first
//! row that does not parse as numbers is taken as a header.

use std::collections::BTreeMap;
use std::fs;
use std::io::Read;
use std::path::Path;

use serde::Deserialize;

use crate::aggregate::ScoreMatrix;
use crate::divergence::{DiscountProfile, PartialOrder};
use crate::error::{LbError, Result};
use crate::permutation::Permutation;
use crate::submodular::{SetFunction, WeightMatrix};

fn read_path(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| LbError::Parse(format!("{}: {e}", path.display())))
}

/// Parses `"0.1, 0.2"` or `"[0.1, 0.2]"`.
pub fn parse_vector(s: &str) -> Result<Vec<f64>> {
    let body = s.trim().trim_start_matches('[').trim_end_matches(']');
    body.split(',')
        .enumerate()
        .map(|(i, tok)| {
            tok.trim()
                .parse::<f64>()
                .map_err(|e| LbError::Parse(format!("entry {} ({:?}): {e}", i + 1, tok.trim())))
        })
        .collect()
}

/// Parses a 1-based index list such as `"1,3"`.
pub fn parse_items(s: &str) -> Result<Vec<usize>> {
    let body = s.trim().trim_start_matches('[').trim_end_matches(']');
    body.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<usize>()
                .map_err(|e| LbError::Parse(format!("bad item {:?}: {e}", tok.trim())))
        })
        .collect()
}

pub fn parse_permutation(s: &str) -> Result<Permutation> {
    s.parse()
}

type CsvRows = (Option<Vec<String>>, Vec<Vec<f64>>);

/// Numeric rows of a CSV document, plus the header if one was present.
fn read_csv_rows<R: Read>(reader: R) -> Result<CsvRows> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut header = None;
    let mut rows = Vec::new();
    for (k, record) in csv.records().enumerate() {
        let record = record.map_err(|e| LbError::Parse(format!("CSV: {e}")))?;
        let line = record.position().map_or(k as u64 + 1, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, (usize, String)> = record
            .iter()
            .enumerate()
            .map(|(col, field)| field.parse::<f64>().map_err(|e| (col + 1, format!("{field:?}: {e}"))))
            .collect();
        match parsed {
            Ok(values) => rows.push(values),
            Err(_) if rows.is_empty() && header.is_none() => {
                header = Some(record.iter().map(str::to_owned).collect());
            }
            Err((col, msg)) => {
                return Err(LbError::Parse(format!("row {line}, column {col}: {msg}")));
            }
        }
        if let (Some(first), Some(last)) = (rows.first(), rows.last()) {
            if first.len() != last.len() {
                return Err(LbError::Parse(format!(
                    "row {line}: expected {} fields, found {}",
                    first.len(),
                    last.len()
                )));
            }
        }
    }
    Ok((header, rows))
}

pub fn read_score_matrix_csv<R: Read>(reader: R) -> Result<ScoreMatrix> {
    let (_, rows) = read_csv_rows(reader)?;
    ScoreMatrix::new(rows)
}

/// Accepts `[[…], …]` or `{"rows": [[…], …], "row_ids": [...]}`.
pub fn read_score_matrix_json(text: &str) -> Result<ScoreMatrix> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Form {
        Bare(Vec<Vec<f64>>),
        Full(ScoreMatrix),
    }
    match serde_json::from_str::<Form>(text).map_err(|e| LbError::Parse(format!("score matrix JSON: {e}")))? {
        Form::Bare(rows) => ScoreMatrix::new(rows),
        Form::Full(m) => Ok(m),
    }
}

/// Reads a `.json` file as JSON and anything else as CSV.
pub fn load_score_matrix(path: &Path) -> Result<ScoreMatrix> {
    let text = read_path(path)?;
    if is_json(path) {
        read_score_matrix_json(&text)
    } else {
        read_score_matrix_csv(text.as_bytes())
    }
}

fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

pub fn read_weight_matrix_csv<R: Read>(reader: R) -> Result<WeightMatrix> {
    let (_, rows) = read_csv_rows(reader)?;
    WeightMatrix::new(rows)
}

pub fn load_weight_matrix(path: &Path) -> Result<WeightMatrix> {
    read_weight_matrix_csv(read_path(path)?.as_bytes())
}

/// A JSON array of gains `δ_g(1), …, δ_g(n)`.
pub fn read_gain_table_json(text: &str) -> Result<Vec<f64>> {
    serde_json::from_str(text).map_err(|e| LbError::Parse(format!("gain table JSON: {e}")))
}

pub fn load_gain_table(path: &Path) -> Result<Vec<f64>> {
    read_gain_table_json(&read_path(path)?)
}

/// A JSON object mapping subset bitmasks (decimal strings, bit `i − 1` for
/// item `i`) to values, covering all `2^n` subsets; a plain array indexed by
/// bitmask is also accepted.
pub fn read_explicit_table_json(text: &str) -> Result<SetFunction> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Form {
        Array(Vec<f64>),
        Map(BTreeMap<String, f64>),
    }
    let values = match serde_json::from_str::<Form>(text).map_err(|e| LbError::Parse(format!("table JSON: {e}")))? {
        Form::Array(v) => v,
        Form::Map(map) => {
            let mut v = vec![f64::NAN; map.len()];
            for (key, value) in map {
                let mask: usize = key
                    .trim()
                    .parse()
                    .map_err(|e| LbError::Parse(format!("table key {key:?}: {e}")))?;
                if mask >= v.len() {
                    return Err(LbError::Parse(format!("table key {mask} outside a complete table")));
                }
                v[mask] = value;
            }
            v
        }
    };
    let len = values.len();
    if !len.is_power_of_two() {
        return Err(LbError::Parse(format!("table has {len} entries, not a power of two")));
    }
    SetFunction::explicit_table(len.trailing_zeros() as usize, values)
}

pub fn load_explicit_table(path: &Path) -> Result<SetFunction> {
    read_explicit_table_json(&read_path(path)?)
}

/// A JSON list of `{"above": a, "below": b, "weight": w}`.
pub fn read_partial_order_json(text: &str) -> Result<PartialOrder> {
    serde_json::from_str(text).map_err(|e| LbError::Parse(format!("partial order JSON: {e}")))
}

/// `"log2"` or a JSON array of discounts; `len` sizes the `log2` profile.
pub fn parse_discount_profile(text: &str, len: usize, cutoff: usize) -> Result<DiscountProfile> {
    if text.trim().eq_ignore_ascii_case("log2") {
        return DiscountProfile::log2(len, cutoff);
    }
    let values: Vec<f64> =
        serde_json::from_str(text).map_err(|e| LbError::Parse(format!("discount profile: {e}")))?;
    DiscountProfile::new(values, cutoff)
}
