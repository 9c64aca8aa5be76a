//! Permutations over items `1..=n`, orderings induced by score vectors, and
//! the classical permutation metrics.
//!
//! A [`Permutation`] `σ` maps ranks to items: `σ(i)` is the item placed at
//! rank `i`. Its inverse maps items to ranks.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_finite, check_len, LbError, Result};

/// A bijection on `{1, …, n}`; entry `i` is the item at rank `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation {
    // 0-based item at each 0-based rank.
    items: Vec<usize>,
    // 0-based rank of each 0-based item.
    ranks: Vec<usize>,
}

impl Permutation {
    /// Builds a permutation from a 1-based rank → item mapping.
    pub fn new(mapping: Vec<usize>) -> Result<Self> {
        let n = mapping.len();
        if n == 0 {
            return Err(LbError::InvalidPermutation("empty mapping".into()));
        }
        let mut ranks = vec![usize::MAX; n];
        let mut items = Vec::with_capacity(n);
        for (rank, &item) in mapping.iter().enumerate() {
            if item == 0 || item > n {
                return Err(LbError::InvalidPermutation(format!(
                    "entry {item} at rank {} is outside 1..={n}",
                    rank + 1
                )));
            }
            if ranks[item - 1] != usize::MAX {
                return Err(LbError::InvalidPermutation(format!(
                    "item {item} appears more than once"
                )));
            }
            ranks[item - 1] = rank;
            items.push(item - 1);
        }
        Ok(Self { items, ranks })
    }

    pub(crate) fn from_zero_based(items: Vec<usize>) -> Self {
        let mut ranks = vec![0; items.len()];
        for (rank, &item) in items.iter().enumerate() {
            ranks[item] = rank;
        }
        Self { items, ranks }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_zero_based((0..n).collect())
    }

    /// Uniformly random permutation of `n` items.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut items: Vec<usize> = (0..n).collect();
        items.shuffle(rng);
        Self::from_zero_based(items)
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Item placed at 1-based `rank`.
    pub fn item_at(&self, rank: usize) -> usize {
        self.items[rank - 1] + 1
    }

    /// 1-based rank of 1-based `item`.
    pub fn rank_of(&self, item: usize) -> usize {
        self.ranks[item - 1] + 1
    }

    pub fn inverse(&self) -> Self {
        Self {
            items: self.ranks.clone(),
            ranks: self.items.clone(),
        }
    }

    /// The 1-based mapping `(σ(1), …, σ(n))`.
    pub fn to_vec(&self) -> Vec<usize> {
        self.items.iter().map(|&i| i + 1).collect()
    }

    /// 0-based items in rank order.
    pub(crate) fn items(&self) -> &[usize] {
        &self.items
    }

    /// 0-based rank of each 0-based item.
    pub(crate) fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    /// `(σπ)(i) = σ(π(i))`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        check_len(self.len(), other.len())?;
        Ok(Self::from_zero_based(
            other.items.iter().map(|&j| self.items[j]).collect(),
        ))
    }

    /// `(τx)(i) = x(τ⁻¹(i))`.
    pub fn relabel_scores(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.len(), x.len())?;
        Ok(self.ranks.iter().map(|&r| x[r]).collect())
    }

    /// True when `x` is non-increasing along this ordering, i.e. the
    /// permutation belongs to the set of orderings consistent with `x`.
    pub fn is_consistent_with(&self, x: &[f64]) -> bool {
        x.len() == self.len() && self.items.windows(2).all(|w| x[w[0]] >= x[w[1]])
    }

    /// All `n!` permutations in lexicographic order of their mappings.
    pub fn all(n: usize) -> AllPermutations {
        AllPermutations {
            next: Some((0..n).collect()),
        }
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, item) in self.items.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", item + 1)?;
        }
        Ok(())
    }
}

impl FromStr for Permutation {
    type Err = LbError;

    /// Parses comma-separated 1-based items, e.g. `"3,1,2"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches('[').trim_end_matches(']');
        let mapping = s
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<usize>()
                    .map_err(|e| LbError::Parse(format!("bad permutation entry {tok:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Permutation::new(mapping)
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = LbError;

    fn try_from(mapping: Vec<usize>) -> Result<Self> {
        Permutation::new(mapping)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.to_vec()
    }
}

/// Iterator returned by [`Permutation::all`].
pub struct AllPermutations {
    next: Option<Vec<usize>>,
}

impl Iterator for AllPermutations {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let current = self.next.take()?;
        if current.is_empty() {
            return None;
        }
        let mut succ = current.clone();
        if next_permutation(&mut succ) {
            self.next = Some(succ);
        }
        Some(Permutation::from_zero_based(current))
    }
}

/// Advances `v` to its lexicographic successor; false when `v` was the last.
pub(crate) fn next_permutation(v: &mut [usize]) -> bool {
    let n = v.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// How equal scores are ordered when inducing a permutation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieRule {
    /// Equal scores are ranked by ascending item index.
    #[default]
    LowestIndexFirst,
    /// Equal scores are an error.
    Reject,
}

impl FromStr for TieRule {
    type Err = LbError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "lowest-index-first" | "lowest-index" | "lowest" => Ok(TieRule::LowestIndexFirst),
            "reject" => Ok(TieRule::Reject),
            other => Err(LbError::Parse(format!("unknown tie rule {other:?}"))),
        }
    }
}

impl fmt::Display for TieRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TieRule::LowestIndexFirst => "lowest-index-first",
            TieRule::Reject => "reject",
        })
    }
}

/// The permutation `σ_x` sorting `x` in descending order.
pub fn induced_ordering(x: &[f64], rule: TieRule) -> Result<Permutation> {
    if x.is_empty() {
        return Err(LbError::InvalidArgument("empty score vector".into()));
    }
    check_finite(x)?;
    let ordering = ordering_of(x);
    let items = ordering.items();
    if rule == TieRule::Reject {
        let mut tied: Vec<usize> = Vec::new();
        for w in items.windows(2) {
            if x[w[0]] == x[w[1]] {
                tied.push(w[0] + 1);
                tied.push(w[1] + 1);
            }
        }
        if !tied.is_empty() {
            tied.sort_unstable();
            tied.dedup();
            return Err(LbError::Tie { items: tied });
        }
    }
    Ok(ordering)
}

/// Lowest-index-first ordering of already validated scores.
pub(crate) fn ordering_of(x: &[f64]) -> Permutation {
    let mut items: Vec<usize> = (0..x.len()).collect();
    // Stable sort keeps ascending index order among equal scores.
    items.sort_by(|&a, &b| x[b].partial_cmp(&x[a]).unwrap_or(std::cmp::Ordering::Equal));
    Permutation::from_zero_based(items)
}

/// Number of pairs ranked in opposite order by `σ` and `π`.
pub fn kendall_tau(sigma: &Permutation, pi: &Permutation) -> Result<u64> {
    check_len(sigma.len(), pi.len())?;
    // Position under σ of the item π places at each rank.
    let seq: Vec<usize> = pi.items.iter().map(|&it| sigma.ranks[it]).collect();
    let mut count = 0u64;
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            if seq[i] > seq[j] {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// Spearman's footrule `Σ |σ⁻¹(i) − π⁻¹(i)|`.
pub fn spearman_footrule(sigma: &Permutation, pi: &Permutation) -> Result<u64> {
    check_len(sigma.len(), pi.len())?;
    Ok(sigma
        .ranks
        .iter()
        .zip(&pi.ranks)
        .map(|(&a, &b)| a.abs_diff(b) as u64)
        .sum())
}

/// Spearman's rank correlation distance `Σ (σ⁻¹(i) − π⁻¹(i))²`.
pub fn rank_correlation(sigma: &Permutation, pi: &Permutation) -> Result<u64> {
    check_len(sigma.len(), pi.len())?;
    Ok(sigma
        .ranks
        .iter()
        .zip(&pi.ranks)
        .map(|(&a, &b)| {
            let d = a.abs_diff(b) as u64;
            d * d
        })
        .sum())
}
