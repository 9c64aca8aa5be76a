//! Lovász-Bregman divergences between a score vector and a permutation.
//!
//! The generic form `d_f(x || σ) = ⟨x, h_{σ_x} − h_σ⟩` is computed by
//! [`lb_divergence`] for any generator. The closed forms for cardinality,
//! top-m and cut generators, the NDCG and AUC losses, and the partial-order
//! distortion are evaluated directly from their own formulas and can be
//! checked against the generic form.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{check_finite, check_len, LbError, Result};
use crate::lovasz::greedy_gains;
use crate::permutation::{induced_ordering, ordering_of, Permutation, TieRule};
use crate::submodular::{SetFunction, Subset, WeightMatrix};

/// Values in `[-ZERO_CLAMP, 0)` are reported as exactly zero.
pub const ZERO_CLAMP: f64 = 1e-12;

fn clamp_zero(v: f64) -> f64 {
    if (-ZERO_CLAMP..0.0).contains(&v) {
        0.0
    } else {
        v
    }
}

fn check_scores(n: usize, x: &[f64], sigma: &Permutation) -> Result<()> {
    check_len(n, x.len())?;
    check_len(n, sigma.len())?;
    check_finite(x)
}

/// `d_f(x || σ) = ⟨x, h^f_{σ_x} − h^f_σ⟩ = f̂(x) − ⟨x, h^f_σ⟩`.
///
/// Nonnegative for submodular `f`; zero whenever `σ` is consistent with `x`.
/// The value does not depend on how ties in `x` are ordered, but
/// [`TieRule::Reject`] turns ties into an error.
pub fn lb_divergence(f: &SetFunction, x: &[f64], sigma: &Permutation, rule: TieRule) -> Result<f64> {
    check_scores(f.n(), x, sigma)?;
    let sigma_x = induced_ordering(x, rule)?;
    let hx = greedy_gains(f, &sigma_x);
    let hs = greedy_gains(f, sigma);
    let d = x.iter().zip(hx.iter().zip(&hs)).map(|(xi, (a, b))| xi * (a - b)).sum();
    Ok(clamp_zero(d))
}

fn check_non_increasing(gains: &[f64]) -> Result<()> {
    if gains.iter().any(|g| !g.is_finite()) {
        return Err(LbError::InvalidArgument("non-finite gain".into()));
    }
    match gains.windows(2).position(|w| w[0] < w[1]) {
        None => Ok(()),
        Some(i) => Err(LbError::InvalidArgument(format!(
            "gain table must be non-increasing at position {}",
            i + 1
        ))),
    }
}

/// Sum of `x(σ(i)) · δ(i)` over the first `m` ranks.
fn weighted_prefix(x: &[f64], order: &Permutation, gains: &[f64], m: usize) -> f64 {
    order.items()[..m].iter().zip(gains).map(|(&item, g)| x[item] * g).sum()
}

/// Closed form for `f(X) = g(|X|)`:
/// `Σ_i x(σ_x(i)) δ_g(i) − Σ_i x(σ(i)) δ_g(i)`.
pub fn lb_cardinality(gains: &[f64], x: &[f64], sigma: &Permutation) -> Result<f64> {
    check_scores(gains.len(), x, sigma)?;
    check_non_increasing(gains)?;
    let n = x.len();
    let sigma_x = ordering_of(x);
    Ok(clamp_zero(
        weighted_prefix(x, &sigma_x, gains, n) - weighted_prefix(x, sigma, gains, n),
    ))
}

/// Closed form for `f(X) = min{g(|X|), g(m)}`:
/// `Σ_{i≤m} x(σ_x(i)) δ_g(i) − Σ_{i≤m} x(σ(i)) δ_g(i)`.
///
/// Only the first `m` gains are read, so `gains` may be shorter than `x`.
pub fn lb_top_m(gains: &[f64], m: usize, x: &[f64], sigma: &Permutation) -> Result<f64> {
    check_scores(x.len(), x, sigma)?;
    let n = x.len();
    if m == 0 || m > n {
        return Err(LbError::CutoffOutOfRange { m, n });
    }
    if gains.len() < m {
        return Err(LbError::LengthMismatch {
            expected: m,
            got: gains.len(),
        });
    }
    check_non_increasing(&gains[..m])?;
    let sigma_x = ordering_of(x);
    Ok(clamp_zero(
        weighted_prefix(x, &sigma_x, gains, m) - weighted_prefix(x, sigma, gains, m),
    ))
}

/// How many orientations of each discordant pair the cut form counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    /// Each discordant pair once; recovers Kendall tau and the AUC loss.
    Single,
    /// Both orientations; equals the generic divergence of the cut function.
    Double,
}

impl Orientation {
    pub fn count(self) -> u8 {
        match self {
            Orientation::Single => 1,
            Orientation::Double => 2,
        }
    }
}

impl TryFrom<u8> for Orientation {
    type Error = LbError;

    fn try_from(v: u8) -> Result<Self> {
        match v {
            1 => Ok(Orientation::Single),
            2 => Ok(Orientation::Double),
            _ => Err(LbError::InvalidArgument(format!("orientation count must be 1 or 2, got {v}"))),
        }
    }
}

/// Cut form:
/// `c · Σ_{i<j} W(σ(i),σ(j)) |x(σ(i)) − x(σ(j))| · I(σ_x⁻¹σ(i) > σ_x⁻¹σ(j))`
/// with `c` the orientation count.
pub fn lb_cut(weights: &WeightMatrix, x: &[f64], sigma: &Permutation, orientation: Orientation) -> Result<f64> {
    check_scores(weights.len(), x, sigma)?;
    let rank_x = ordering_of(x);
    let rank_x = rank_x.ranks();
    let items = sigma.items();
    let mut total = 0.0;
    for (i, &a) in items.iter().enumerate() {
        for &b in &items[i + 1..] {
            if rank_x[a] > rank_x[b] {
                total += weights.at(a, b) * (x[a] - x[b]).abs();
            }
        }
    }
    Ok(clamp_zero(f64::from(orientation.count()) * total))
}

/// Positional discounts `D(1) ≥ D(2) ≥ … > 0` with a cutoff `k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscountProfile {
    values: Vec<f64>,
    cutoff: usize,
}

impl DiscountProfile {
    pub fn new(values: Vec<f64>, cutoff: usize) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite() || *v <= 0.0) {
            return Err(LbError::InvalidArgument("discounts must be finite and positive".into()));
        }
        if values.windows(2).any(|w| w[0] < w[1]) {
            return Err(LbError::InvalidArgument("discounts must be non-increasing".into()));
        }
        if cutoff == 0 || cutoff > values.len() {
            return Err(LbError::CutoffOutOfRange {
                m: cutoff,
                n: values.len(),
            });
        }
        Ok(Self { values, cutoff })
    }

    /// `D(i) = 1 / log₂(i + 1)` for `i = 1..=len`.
    pub fn log2(len: usize, cutoff: usize) -> Result<Self> {
        Self::new((1..=len).map(|i| 1.0 / ((i + 1) as f64).log2()).collect(), cutoff)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn with_cutoff(&self, cutoff: usize) -> Result<Self> {
        Self::new(self.values.clone(), cutoff)
    }
}

fn check_relevance(r: &[f64], sigma: &Permutation, discount: &DiscountProfile) -> Result<()> {
    check_scores(r.len(), r, sigma)?;
    if let Some(i) = r.iter().position(|&v| v < 0.0) {
        return Err(LbError::InvalidArgument(format!("negative relevance at item {}", i + 1)));
    }
    if discount.cutoff > r.len() {
        return Err(LbError::CutoffOutOfRange {
            m: discount.cutoff,
            n: r.len(),
        });
    }
    Ok(())
}

/// Unnormalized NDCG loss: the ideal DCG@k minus the DCG@k of `σ`.
pub fn dcg_shortfall(r: &[f64], sigma: &Permutation, discount: &DiscountProfile) -> Result<f64> {
    check_relevance(r, sigma, discount)?;
    let k = discount.cutoff;
    let ideal = ordering_of(r);
    let best = weighted_prefix(r, &ideal, &discount.values, k);
    let got = weighted_prefix(r, sigma, &discount.values, k);
    Ok(clamp_zero(best - got))
}

/// NDCG loss `(DCG@k(σ_r) − DCG@k(σ)) / DCG@k(σ_r)`, in `[0, 1]`.
pub fn ndcg_loss(r: &[f64], sigma: &Permutation, discount: &DiscountProfile) -> Result<f64> {
    check_relevance(r, sigma, discount)?;
    let ideal = weighted_prefix(r, &ordering_of(r), &discount.values, discount.cutoff);
    if ideal <= 0.0 {
        return Err(LbError::ZeroRelevance);
    }
    Ok((dcg_shortfall(r, sigma, discount)? / ideal).clamp(0.0, 1.0))
}

/// Fraction of (good, bad) pairs where `σ` ranks the bad item higher.
pub fn auc_loss(good: &[usize], bad: &[usize], sigma: &Permutation) -> Result<f64> {
    let n = sigma.len();
    if good.is_empty() || bad.is_empty() {
        return Err(LbError::InvalidArgument("good and bad classes must be nonempty".into()));
    }
    let mut seen = vec![false; n];
    for &item in good.iter().chain(bad) {
        if item == 0 || item > n {
            return Err(LbError::ItemOutOfRange { item, n });
        }
        if seen[item - 1] {
            return Err(LbError::InvalidArgument(format!(
                "item {item} appears more than once across the classes"
            )));
        }
        seen[item - 1] = true;
    }
    // Accumulated one pair weight at a time, as the weighted cut form does.
    let pair_weight = 1.0 / (good.len() * bad.len()) as f64;
    let mut loss = 0.0;
    for &g in good {
        for &b in bad {
            if sigma.rank_of(g) > sigma.rank_of(b) {
                loss += pair_weight;
            }
        }
    }
    Ok(loss)
}

/// One weighted constraint `above ≻ below`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderConstraint {
    pub above: usize,
    pub below: usize,
    pub weight: f64,
}

/// A weighted set of pairwise preferences over 1-based items.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<OrderConstraint>", into = "Vec<OrderConstraint>")]
pub struct PartialOrder {
    constraints: Vec<OrderConstraint>,
}

impl PartialOrder {
    pub fn new(constraints: Vec<OrderConstraint>) -> Result<Self> {
        for c in &constraints {
            if c.above == 0 || c.below == 0 {
                return Err(LbError::InvalidArgument("items are 1-based".into()));
            }
            if c.above == c.below {
                return Err(LbError::InvalidArgument(format!(
                    "constraint pairs item {} with itself",
                    c.above
                )));
            }
            if !(c.weight.is_finite() && c.weight > 0.0) {
                return Err(LbError::InvalidArgument(format!(
                    "constraint weight {} must be positive",
                    c.weight
                )));
            }
        }
        Ok(Self { constraints })
    }

    pub fn constraints(&self) -> &[OrderConstraint] {
        &self.constraints
    }
}

impl TryFrom<Vec<OrderConstraint>> for PartialOrder {
    type Error = LbError;

    fn try_from(c: Vec<OrderConstraint>) -> Result<Self> {
        PartialOrder::new(c)
    }
}

impl From<PartialOrder> for Vec<OrderConstraint> {
    fn from(p: PartialOrder) -> Self {
        p.constraints
    }
}

/// `Σ w · max(x(below) − x(above), 0)` over all constraints.
pub fn partial_order_distortion(order: &PartialOrder, x: &[f64]) -> Result<f64> {
    check_finite(x)?;
    let n = x.len();
    let mut total = 0.0;
    for c in &order.constraints {
        for item in [c.above, c.below] {
            if item > n {
                return Err(LbError::ItemOutOfRange { item, n });
            }
        }
        total += c.weight * (x[c.below - 1] - x[c.above - 1]).max(0.0);
    }
    Ok(total)
}

/// Upper bound `ε · n · (max_j f({j}) − min_j f(j | V∖{j}))` on
/// `d_f(x || σ)` over all `σ`, with `ε = max_{i,j} |x_i − x_j|`.
pub fn confidence_bound(f: &SetFunction, x: &[f64]) -> Result<f64> {
    let n = f.n();
    check_len(n, x.len())?;
    check_finite(x)?;
    let max = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = x.iter().copied().fold(f64::INFINITY, f64::min);
    let eps = max - min;
    let full = Subset::full(n);
    let f_full = f.evaluate(&full)?;
    let mut best_single = f64::NEG_INFINITY;
    let mut worst_tail = f64::INFINITY;
    for item in 1..=n {
        best_single = best_single.max(f.evaluate(&Subset::from_items(n, &[item])?)?);
        let rest = Subset::from_items(n, &(1..=n).filter(|&j| j != item).collect::<Vec<_>>())?;
        worst_tail = worst_tail.min(f_full - f.evaluate(&rest)?);
    }
    Ok(eps * n as f64 * (best_single - worst_tail))
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.count())
    }
}
