//! Set functions over a finite ground set and exhaustive structural checks.
//!
//! Every generator is normalized (`f(∅) = 0`). Concave cardinality functions
//! are stored through their gain table `δ_g(i) = g(i) − g(i−1)`, which must be
//! non-increasing.

use serde::{Deserialize, Serialize};

use crate::error::{check_len, LbError, Result};

/// Absolute tolerance for the exhaustive submodularity and monotonicity checks.
pub const STRUCTURAL_TOL: f64 = 1e-9;

/// Largest ground set for which a full `2^n` table is built.
pub const MAX_TABLE_ITEMS: usize = 20;

/// Items `1..=n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GroundSet {
    n: usize,
}

impl GroundSet {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(LbError::InvalidArgument("ground set must be nonempty".into()));
        }
        Ok(Self { n })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn items(&self) -> std::ops::RangeInclusive<usize> {
        1..=self.n
    }
}

/// A subset of a ground set `1..=n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subset {
    members: Vec<bool>,
}

impl Subset {
    pub fn empty(n: usize) -> Self {
        Self {
            members: vec![false; n],
        }
    }

    pub fn full(n: usize) -> Self {
        Self {
            members: vec![true; n],
        }
    }

    pub fn from_items(n: usize, items: &[usize]) -> Result<Self> {
        let mut s = Self::empty(n);
        for &item in items {
            s.check(item)?;
            s.members[item - 1] = true;
        }
        Ok(s)
    }

    /// Bit `i − 1` of `mask` marks item `i`.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        Self {
            members: (0..n).map(|i| i < 64 && mask >> i & 1 == 1).collect(),
        }
    }

    fn check(&self, item: usize) -> Result<()> {
        if item == 0 || item > self.members.len() {
            Err(LbError::ItemOutOfRange {
                item,
                n: self.members.len(),
            })
        } else {
            Ok(())
        }
    }

    pub fn universe_size(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, item: usize) -> bool {
        item >= 1 && item <= self.members.len() && self.members[item - 1]
    }

    pub fn insert(&mut self, item: usize) -> Result<bool> {
        self.check(item)?;
        let fresh = !self.members[item - 1];
        self.members[item - 1] = true;
        Ok(fresh)
    }

    /// Cardinality.
    pub fn len(&self) -> usize {
        self.members.iter().filter(|&&m| m).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.members.iter().any(|&m| m)
    }

    pub fn items(&self) -> Vec<usize> {
        (1..=self.members.len()).filter(|&i| self.members[i - 1]).collect()
    }

    pub(crate) fn members(&self) -> &[bool] {
        &self.members
    }
}

/// Nonnegative symmetric weights with zero diagonal, defining a graph cut.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct WeightMatrix {
    n: usize,
    data: Vec<f64>,
}

impl WeightMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(LbError::InvalidArgument("empty weight matrix".into()));
        }
        let mut data = Vec::with_capacity(n * n);
        for row in &rows {
            check_len(n, row.len())?;
            data.extend_from_slice(row);
        }
        for i in 0..n {
            if data[i * n + i] != 0.0 {
                return Err(LbError::InvalidArgument(format!(
                    "weight matrix diagonal entry {} is nonzero",
                    i + 1
                )));
            }
            for j in 0..n {
                let w = data[i * n + j];
                if !w.is_finite() || w < 0.0 {
                    return Err(LbError::InvalidArgument(format!(
                        "weight ({}, {}) = {w} is not a finite nonnegative number",
                        i + 1,
                        j + 1
                    )));
                }
                if w != data[j * n + i] {
                    return Err(LbError::AsymmetricWeights { i: i + 1, j: j + 1 });
                }
            }
        }
        Ok(Self { n, data })
    }

    /// Every off-diagonal pair carries `weight`.
    pub fn uniform(n: usize, weight: f64) -> Result<Self> {
        Self::new(
            (0..n)
                .map(|i| (0..n).map(|j| if i == j { 0.0 } else { weight }).collect())
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Weight between 1-based items `i` and `j`.
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.at(i - 1, j - 1)
    }

    #[inline]
    pub(crate) fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n).map(<[f64]>::to_vec).collect()
    }
}

impl TryFrom<Vec<Vec<f64>>> for WeightMatrix {
    type Error = LbError;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        WeightMatrix::new(rows)
    }
}

impl From<WeightMatrix> for Vec<Vec<f64>> {
    fn from(w: WeightMatrix) -> Self {
        w.rows()
    }
}

/// The serializable description of a generator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Descriptor {
    /// `g(|A|)` for concave `g`, given by its gain table `δ_g(1..=n)`.
    CardinalityConcave { gains: Vec<f64> },
    /// `min{g(|A|), g(m)}` with nonnegative gains.
    TruncatedCardinality { gains: Vec<f64>, cutoff: usize },
    /// `Σ_{i∈A, j∉A} W_ij`.
    GraphCut { weights: WeightMatrix },
    /// `min{|A|, 1}`.
    MaxTruncation { n: usize },
    /// `I(1 ≤ |A| ≤ n−1)`.
    RangeIndicator { n: usize },
    /// `I(A ≠ ∅, A ≠ V)`.
    ProperSubsetIndicator { n: usize },
    /// One value per subset bitmask; normalized so the empty set maps to 0.
    ExplicitTable { n: usize, values: Vec<f64> },
    /// `Σ_{i∈A} w_i`.
    Modular { weights: Vec<f64> },
    Sum { terms: Vec<Descriptor> },
}

impl Descriptor {
    fn validate(self) -> Result<(usize, Descriptor)> {
        let n = match &self {
            Descriptor::CardinalityConcave { gains } => {
                check_gains(gains)?;
                gains.len()
            }
            Descriptor::TruncatedCardinality { gains, cutoff } => {
                check_gains(gains)?;
                if gains.iter().any(|&g| g < 0.0) {
                    return Err(LbError::InvalidSetFunction(
                        "truncated cardinality gains must be nonnegative".into(),
                    ));
                }
                if *cutoff == 0 || *cutoff > gains.len() {
                    return Err(LbError::CutoffOutOfRange {
                        m: *cutoff,
                        n: gains.len(),
                    });
                }
                gains.len()
            }
            Descriptor::GraphCut { weights } => weights.len(),
            Descriptor::MaxTruncation { n }
            | Descriptor::RangeIndicator { n }
            | Descriptor::ProperSubsetIndicator { n } => *n,
            Descriptor::ExplicitTable { n, values } => {
                if *n > MAX_TABLE_ITEMS {
                    return Err(LbError::GroundSetTooLarge {
                        n: *n,
                        max: MAX_TABLE_ITEMS,
                    });
                }
                check_len(1 << *n, values.len())?;
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(LbError::InvalidSetFunction("non-finite table value".into()));
                }
                *n
            }
            Descriptor::Modular { weights } => {
                if weights.iter().any(|v| !v.is_finite()) {
                    return Err(LbError::InvalidSetFunction("non-finite modular weight".into()));
                }
                weights.len()
            }
            Descriptor::Sum { terms } => {
                let mut n = None;
                for t in terms {
                    let (m, _) = t.clone().validate()?;
                    match n {
                        None => n = Some(m),
                        Some(n) => check_len(n, m)?,
                    }
                }
                n.ok_or_else(|| LbError::InvalidSetFunction("empty sum".into()))?
            }
        };
        if n == 0 {
            return Err(LbError::InvalidSetFunction("empty ground set".into()));
        }
        let normalized = match self {
            Descriptor::ExplicitTable { n, values } => {
                let base = values[0];
                Descriptor::ExplicitTable {
                    n,
                    values: values.into_iter().map(|v| v - base).collect(),
                }
            }
            other => other,
        };
        Ok((n, normalized))
    }

    /// Short family name used in reports.
    pub fn name(&self) -> &'static str {
        match self {
            Descriptor::CardinalityConcave { .. } => "cardinality_concave",
            Descriptor::TruncatedCardinality { .. } => "truncated_cardinality",
            Descriptor::GraphCut { .. } => "graph_cut",
            Descriptor::MaxTruncation { .. } => "max_truncation",
            Descriptor::RangeIndicator { .. } => "range_indicator",
            Descriptor::ProperSubsetIndicator { .. } => "proper_subset_indicator",
            Descriptor::ExplicitTable { .. } => "explicit_table",
            Descriptor::Modular { .. } => "modular",
            Descriptor::Sum { .. } => "sum",
        }
    }

    fn eval_members(&self, members: &[bool]) -> f64 {
        let n = members.len();
        let k = members.iter().filter(|&&m| m).count();
        match self {
            Descriptor::CardinalityConcave { gains } => gains[..k].iter().sum(),
            Descriptor::TruncatedCardinality { gains, cutoff } => {
                let g_k: f64 = gains[..k].iter().sum();
                let g_m: f64 = gains[..*cutoff].iter().sum();
                g_k.min(g_m)
            }
            Descriptor::GraphCut { weights } => {
                let mut total = 0.0;
                for i in (0..n).filter(|&i| members[i]) {
                    for j in (0..n).filter(|&j| !members[j]) {
                        total += weights.at(i, j);
                    }
                }
                total
            }
            Descriptor::MaxTruncation { .. } => k.min(1) as f64,
            Descriptor::RangeIndicator { .. } | Descriptor::ProperSubsetIndicator { .. } => {
                indicator(k >= 1 && k < n)
            }
            Descriptor::ExplicitTable { values, .. } => values[mask_of(members)],
            Descriptor::Modular { weights } => (0..n).filter(|&i| members[i]).map(|i| weights[i]).sum(),
            Descriptor::Sum { terms } => terms.iter().map(|t| t.eval_members(members)).sum(),
        }
    }

    fn prefix_values(&self, order: &[usize]) -> Vec<f64> {
        let n = order.len();
        let mut out = Vec::with_capacity(n + 1);
        match self {
            Descriptor::CardinalityConcave { gains } => {
                out.push(0.0);
                let mut acc = 0.0;
                for g in gains {
                    acc += g;
                    out.push(acc);
                }
            }
            Descriptor::TruncatedCardinality { gains, cutoff } => {
                let g_m: f64 = gains[..*cutoff].iter().sum();
                out.push(0.0);
                let mut acc = 0.0;
                for g in gains {
                    acc += g;
                    out.push(acc.min(g_m));
                }
            }
            Descriptor::GraphCut { weights } => {
                let mut inside = vec![false; n];
                let mut value = 0.0;
                out.push(0.0);
                for &j in order {
                    // Edges from j to the outside become cut, edges into the
                    // current set stop being cut.
                    let mut gain = 0.0;
                    for k in (0..n).filter(|&k| k != j) {
                        if inside[k] {
                            gain -= weights.at(j, k);
                        } else {
                            gain += weights.at(j, k);
                        }
                    }
                    inside[j] = true;
                    value += gain;
                    out.push(value);
                }
            }
            Descriptor::MaxTruncation { .. } => out.extend((0..=n).map(|k| k.min(1) as f64)),
            Descriptor::RangeIndicator { .. } | Descriptor::ProperSubsetIndicator { .. } => {
                out.extend((0..=n).map(|k| indicator(k >= 1 && k < n)))
            }
            Descriptor::ExplicitTable { values, .. } => {
                let mut mask = 0usize;
                out.push(values[0]);
                for &j in order {
                    mask |= 1 << j;
                    out.push(values[mask]);
                }
            }
            Descriptor::Modular { weights } => {
                out.push(0.0);
                let mut acc = 0.0;
                for &j in order {
                    acc += weights[j];
                    out.push(acc);
                }
            }
            Descriptor::Sum { terms } => {
                out.resize(n + 1, 0.0);
                for t in terms {
                    for (o, v) in out.iter_mut().zip(t.prefix_values(order)) {
                        *o += v;
                    }
                }
            }
        }
        out
    }
}

fn indicator(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

fn mask_of(members: &[bool]) -> usize {
    members
        .iter()
        .enumerate()
        .filter(|(_, &m)| m)
        .fold(0, |acc, (i, _)| acc | 1 << i)
}

fn check_gains(gains: &[f64]) -> Result<()> {
    if gains.iter().any(|g| !g.is_finite()) {
        return Err(LbError::InvalidSetFunction("non-finite gain".into()));
    }
    if let Some(w) = gains.windows(2).position(|w| w[0] < w[1]) {
        return Err(LbError::InvalidSetFunction(format!(
            "gain table must be non-increasing: δ({}) < δ({})",
            w + 1,
            w + 2
        )));
    }
    Ok(())
}

/// A normalized set function on `1..=n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Descriptor", into = "Descriptor")]
pub struct SetFunction {
    n: usize,
    descriptor: Descriptor,
}

impl TryFrom<Descriptor> for SetFunction {
    type Error = LbError;

    fn try_from(d: Descriptor) -> Result<Self> {
        let (n, descriptor) = d.validate()?;
        Ok(Self { n, descriptor })
    }
}

impl From<SetFunction> for Descriptor {
    fn from(f: SetFunction) -> Self {
        f.descriptor
    }
}

impl SetFunction {
    pub fn from_descriptor(d: Descriptor) -> Result<Self> {
        Self::try_from(d)
    }

    /// `g(|A|)` from a non-increasing gain table.
    pub fn cardinality(gains: Vec<f64>) -> Result<Self> {
        Self::try_from(Descriptor::CardinalityConcave { gains })
    }

    /// `g(|A|)` from the values `g(0), …, g(n)` of a concave function.
    pub fn cardinality_from_fn(n: usize, g: impl Fn(usize) -> f64) -> Result<Self> {
        Self::cardinality((1..=n).map(|k| g(k) - g(k - 1)).collect())
    }

    /// `√|A|`.
    pub fn sqrt(n: usize) -> Result<Self> {
        Self::cardinality_from_fn(n, |k| (k as f64).sqrt())
    }

    /// `ln(1 + |A|)`.
    pub fn log(n: usize) -> Result<Self> {
        Self::cardinality_from_fn(n, |k| (k as f64).ln_1p())
    }

    pub fn truncated(gains: Vec<f64>, cutoff: usize) -> Result<Self> {
        Self::try_from(Descriptor::TruncatedCardinality { gains, cutoff })
    }

    /// `min{|A|, m}`.
    pub fn top_m(n: usize, m: usize) -> Result<Self> {
        Self::truncated(vec![1.0; n], m)
    }

    pub fn graph_cut(weights: WeightMatrix) -> Result<Self> {
        Self::try_from(Descriptor::GraphCut { weights })
    }

    /// Unit-weight cut on the complete graph, `|A| · |V∖A|`.
    pub fn uniform_cut(n: usize) -> Result<Self> {
        Self::graph_cut(WeightMatrix::uniform(n, 1.0)?)
    }

    pub fn max_truncation(n: usize) -> Result<Self> {
        Self::try_from(Descriptor::MaxTruncation { n })
    }

    pub fn range_indicator(n: usize) -> Result<Self> {
        Self::try_from(Descriptor::RangeIndicator { n })
    }

    pub fn proper_subset_indicator(n: usize) -> Result<Self> {
        Self::try_from(Descriptor::ProperSubsetIndicator { n })
    }

    /// Table indexed by subset bitmask (bit `i − 1` marks item `i`).
    pub fn explicit_table(n: usize, values: Vec<f64>) -> Result<Self> {
        Self::try_from(Descriptor::ExplicitTable { n, values })
    }

    pub fn modular(weights: Vec<f64>) -> Result<Self> {
        Self::try_from(Descriptor::Modular { weights })
    }

    pub fn sum(terms: Vec<SetFunction>) -> Result<Self> {
        Self::try_from(Descriptor::Sum {
            terms: terms.into_iter().map(|t| t.descriptor).collect(),
        })
    }

    /// Size of the ground set.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn descriptor(&self) -> &Descriptor {
        &self.descriptor
    }

    pub fn evaluate(&self, set: &Subset) -> Result<f64> {
        check_len(self.n, set.universe_size())?;
        Ok(self.descriptor.eval_members(set.members()))
    }

    /// `f(A ∪ {j}) − f(A)`.
    pub fn marginal_gain(&self, item: usize, set: &Subset) -> Result<f64> {
        check_len(self.n, set.universe_size())?;
        if set.contains(item) {
            return Err(LbError::ItemInSet { item });
        }
        let mut bigger = set.clone();
        bigger.insert(item)?;
        Ok(self.descriptor.eval_members(bigger.members()) - self.descriptor.eval_members(set.members()))
    }

    /// `f(S_0), f(S_1), …, f(S_n)` along the chain of prefixes of a 0-based
    /// item order.
    pub(crate) fn prefix_values(&self, order: &[usize]) -> Vec<f64> {
        self.descriptor.prefix_values(order)
    }

    pub(crate) fn eval_members(&self, members: &[bool]) -> f64 {
        self.descriptor.eval_members(members)
    }

    /// All `2^n` values indexed by bitmask.
    pub fn table(&self) -> Result<Vec<f64>> {
        if self.n > MAX_TABLE_ITEMS {
            return Err(LbError::GroundSetTooLarge {
                n: self.n,
                max: MAX_TABLE_ITEMS,
            });
        }
        let mut members = vec![false; self.n];
        Ok((0..1usize << self.n)
            .map(|mask| {
                for (i, m) in members.iter_mut().enumerate() {
                    *m = mask >> i & 1 == 1;
                }
                self.descriptor.eval_members(&members)
            })
            .collect())
    }

    /// Exhaustive check of `f(S) + f(T) ≥ f(S∪T) + f(S∩T)` through the
    /// equivalent local form `f(S+i) + f(S+j) ≥ f(S+i+j) + f(S)`.
    pub fn is_submodular(&self) -> Result<bool> {
        let t = self.table()?;
        let n = self.n;
        for s in 0..t.len() {
            for i in (0..n).filter(|&i| s >> i & 1 == 0) {
                for j in (i + 1..n).filter(|&j| s >> j & 1 == 0) {
                    let (si, sj) = (s | 1 << i, s | 1 << j);
                    if t[si] + t[sj] < t[si | sj] + t[s] - STRUCTURAL_TOL {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    /// Exhaustive check of `f(A) ≤ f(B)` for `A ⊆ B`.
    pub fn is_monotone(&self) -> Result<bool> {
        let t = self.table()?;
        for s in 0..t.len() {
            for i in (0..self.n).filter(|&i| s >> i & 1 == 0) {
                if t[s | 1 << i] < t[s] - STRUCTURAL_TOL {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}
