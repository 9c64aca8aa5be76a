//! Textual generator descriptors.
//!
//! ```text
//! cardinality:sqrt          g(k) = √k
//! cardinality:log           g(k) = ln(1 + k)
//! cardinality:file=<path>   gain table from a JSON array
//! cut:uniform               |X| · |V∖X|
//! cut:file=<path>           graph cut with weights from a CSV matrix
//! topm:<m>                  min{|X|, m}
//! max                       min{|X|, 1}
//! range                     I(1 ≤ |X| ≤ n−1)
//! table:file=<path>         explicit table from JSON
//! ```

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{check_len, LbError, Result};
use crate::io;
use crate::submodular::SetFunction;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum GeneratorSpec {
    #[default]
    CardinalitySqrt,
    CardinalityLog,
    CardinalityFile(PathBuf),
    CutUniform,
    CutFile(PathBuf),
    TopM(usize),
    Max,
    Range,
    TableFile(PathBuf),
}

impl GeneratorSpec {
    /// Instantiates the generator on `n` items.
    pub fn build(&self, n: usize) -> Result<SetFunction> {
        let f = match self {
            GeneratorSpec::CardinalitySqrt => SetFunction::sqrt(n)?,
            GeneratorSpec::CardinalityLog => SetFunction::log(n)?,
            GeneratorSpec::CardinalityFile(p) => SetFunction::cardinality(io::load_gain_table(p)?)?,
            GeneratorSpec::CutUniform => SetFunction::uniform_cut(n)?,
            GeneratorSpec::CutFile(p) => SetFunction::graph_cut(io::load_weight_matrix(p)?)?,
            GeneratorSpec::TopM(m) => SetFunction::top_m(n, *m)?,
            GeneratorSpec::Max => SetFunction::max_truncation(n)?,
            GeneratorSpec::Range => SetFunction::range_indicator(n)?,
            GeneratorSpec::TableFile(p) => io::load_explicit_table(p)?,
        };
        check_len(n, f.n())?;
        Ok(f)
    }
}

fn file_arg(kind: &str, rest: &str) -> Result<PathBuf> {
    rest.strip_prefix("file=")
        .filter(|p| !p.is_empty())
        .map(PathBuf::from)
        .ok_or_else(|| LbError::Parse(format!("expected {kind}:file=<path>, got {kind}:{rest}")))
}

impl FromStr for GeneratorSpec {
    type Err = LbError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        match (kind, rest) {
            ("cardinality", "sqrt") => Ok(GeneratorSpec::CardinalitySqrt),
            ("cardinality", "log") => Ok(GeneratorSpec::CardinalityLog),
            ("cardinality", r) => file_arg(kind, r).map(GeneratorSpec::CardinalityFile),
            ("cut", "uniform") => Ok(GeneratorSpec::CutUniform),
            ("cut", r) => file_arg(kind, r).map(GeneratorSpec::CutFile),
            ("topm", m) => m
                .parse()
                .map(GeneratorSpec::TopM)
                .map_err(|e| LbError::Parse(format!("topm cutoff {m:?}: {e}"))),
            ("max", "") => Ok(GeneratorSpec::Max),
            ("range", "") => Ok(GeneratorSpec::Range),
            ("table", r) => file_arg(kind, r).map(GeneratorSpec::TableFile),
            _ => Err(LbError::Parse(format!("unknown generator {s:?}"))),
        }
    }
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorSpec::CardinalitySqrt => f.write_str("cardinality:sqrt"),
            GeneratorSpec::CardinalityLog => f.write_str("cardinality:log"),
            GeneratorSpec::CardinalityFile(p) => write!(f, "cardinality:file={}", p.display()),
            GeneratorSpec::CutUniform => f.write_str("cut:uniform"),
            GeneratorSpec::CutFile(p) => write!(f, "cut:file={}", p.display()),
            GeneratorSpec::TopM(m) => write!(f, "topm:{m}"),
            GeneratorSpec::Max => f.write_str("max"),
            GeneratorSpec::Range => f.write_str("range"),
            GeneratorSpec::TableFile(p) => write!(f, "table:file={}", p.display()),
        }
    }
}
