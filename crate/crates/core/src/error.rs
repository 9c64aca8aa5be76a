use thiserror::Error;

/// Errors raised by every fallible operation in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LbError {
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("tied scores at items {items:?}")]
    Tie { items: Vec<usize> },

    #[error("item {item} out of range 1..={n}")]
    ItemOutOfRange { item: usize, n: usize },

    #[error("item {item} is already in the set")]
    ItemInSet { item: usize },

    #[error("ground set of size {n} exceeds the limit {max} for this operation")]
    GroundSetTooLarge { n: usize, max: usize },

    #[error("{count} tie-consistent orderings exceed the enumeration cap {cap}")]
    EnumerationCap { count: u128, cap: usize },

    #[error("invalid set function: {0}")]
    InvalidSetFunction(String),

    #[error("weight matrix is not symmetric at ({i}, {j})")]
    AsymmetricWeights { i: usize, j: usize },

    #[error("cutoff {m} out of range 1..={n}")]
    CutoffOutOfRange { m: usize, n: usize },

    #[error("relevance vector has no positive entry")]
    ZeroRelevance,

    #[error("score {value} at index {index} lies outside the unit cube")]
    OutsideUnitCube { index: usize, value: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, LbError>;

pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(LbError::LengthMismatch { expected, got })
    }
}

pub(crate) fn check_finite(x: &[f64]) -> Result<()> {
    match x.iter().position(|v| !v.is_finite()) {
        None => Ok(()),
        Some(i) => Err(LbError::InvalidArgument(format!(
            "non-finite score {} at index {}",
            x[i],
            i + 1
        ))),
    }
}
