//! Rank aggregation, weighted feature inference and clustering of score
//! vectors under a Lovász-Bregman divergence.
//!
//! The permutation minimizing `Σ_i w_i d_f(x_i || σ)` is the ordering of the
//! weighted mean of the `x_i`, whatever the submodular generator `f`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::divergence::lb_divergence;
use crate::error::{check_finite, check_len, LbError, Result};
use crate::permutation::{induced_ordering, ordering_of, Permutation, TieRule};
use crate::submodular::SetFunction;

/// Largest item count for [`brute_force_mean`].
pub const MAX_BRUTE_FORCE_ITEMS: usize = 8;

/// Score vectors over a shared set of `n` items, one per row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawScoreMatrix", into = "RawScoreMatrix")]
pub struct ScoreMatrix {
    rows: Vec<Vec<f64>>,
    row_ids: Option<Vec<String>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct RawScoreMatrix {
    rows: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    row_ids: Option<Vec<String>>,
}

impl TryFrom<RawScoreMatrix> for ScoreMatrix {
    type Error = LbError;

    fn try_from(raw: RawScoreMatrix) -> Result<Self> {
        let m = ScoreMatrix::new(raw.rows)?;
        match raw.row_ids {
            Some(ids) => m.with_row_ids(ids),
            None => Ok(m),
        }
    }
}

impl From<ScoreMatrix> for RawScoreMatrix {
    fn from(m: ScoreMatrix) -> Self {
        RawScoreMatrix {
            rows: m.rows,
            row_ids: m.row_ids,
        }
    }
}

impl ScoreMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let first = rows
            .first()
            .ok_or_else(|| LbError::InvalidArgument("score matrix has no rows".into()))?;
        let n = first.len();
        if n == 0 {
            return Err(LbError::InvalidArgument("score rows are empty".into()));
        }
        for row in &rows {
            check_len(n, row.len())?;
            check_finite(row)?;
        }
        Ok(Self { rows, row_ids: None })
    }

    pub fn with_row_ids(mut self, ids: Vec<String>) -> Result<Self> {
        check_len(self.rows.len(), ids.len())?;
        self.row_ids = Some(ids);
        Ok(self)
    }

    /// Number of items (columns).
    pub fn n(&self) -> usize {
        self.rows[0].len()
    }

    /// Number of score vectors.
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i]
    }

    pub fn row_ids(&self) -> Option<&[String]> {
        self.row_ids.as_deref()
    }
}

/// Weighted mean of rows; weights must be nonnegative with a positive sum.
pub(crate) fn weighted_mean(x: &ScoreMatrix, weights: Option<&[f64]>) -> Result<Vec<f64>> {
    let n = x.n();
    let mut acc = vec![0.0; n];
    let total = match weights {
        None => {
            for row in &x.rows {
                for (a, v) in acc.iter_mut().zip(row) {
                    *a += v;
                }
            }
            x.len() as f64
        }
        Some(w) => {
            check_len(x.len(), w.len())?;
            if let Some(i) = w.iter().position(|v| !v.is_finite() || *v < 0.0) {
                return Err(LbError::InvalidArgument(format!("weight {} of row {} is invalid", w[i], i + 1)));
            }
            for (row, wi) in x.rows.iter().zip(w) {
                for (a, v) in acc.iter_mut().zip(row) {
                    *a += wi * v;
                }
            }
            w.iter().sum()
        }
    };
    if total <= 0.0 {
        return Err(LbError::InvalidArgument("weights sum to zero".into()));
    }
    Ok(acc.into_iter().map(|a| a / total).collect())
}

fn check_positive_weights(weights: Option<&[f64]>) -> Result<()> {
    if let Some(w) = weights {
        if let Some(i) = w.iter().position(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(LbError::InvalidArgument(format!(
                "weight of row {} must be positive, got {}",
                i + 1,
                w[i]
            )));
        }
    }
    Ok(())
}

/// The representative ordering `σ_μ` together with the (weighted) mean `μ`.
///
/// No generator is needed: `σ_μ` minimizes the aggregation objective for
/// every submodular `f`.
pub fn mean_ordering(x: &ScoreMatrix, weights: Option<&[f64]>, rule: TieRule) -> Result<(Permutation, Vec<f64>)> {
    check_positive_weights(weights)?;
    let mu = weighted_mean(x, weights)?;
    Ok((induced_ordering(&mu, rule)?, mu))
}

/// `Σ_i w_i · d_f(x_i || σ)`.
pub fn aggregation_objective(
    x: &ScoreMatrix,
    f: &SetFunction,
    sigma: &Permutation,
    weights: Option<&[f64]>,
) -> Result<f64> {
    check_len(f.n(), x.n())?;
    if let Some(w) = weights {
        check_len(x.len(), w.len())?;
    }
    let mut total = 0.0;
    for (i, row) in x.rows.iter().enumerate() {
        let w = weights.map_or(1.0, |w| w[i]);
        total += w * lb_divergence(f, row, sigma, TieRule::LowestIndexFirst)?;
    }
    Ok(total)
}

/// Exhaustive minimizer of [`aggregation_objective`]; exact ties keep the
/// lexicographically smallest permutation.
pub fn brute_force_mean(x: &ScoreMatrix, f: &SetFunction, weights: Option<&[f64]>) -> Result<Permutation> {
    let n = x.n();
    if n > MAX_BRUTE_FORCE_ITEMS {
        return Err(LbError::GroundSetTooLarge {
            n,
            max: MAX_BRUTE_FORCE_ITEMS,
        });
    }
    check_positive_weights(weights)?;
    let mut best: Option<(f64, Permutation)> = None;
    for sigma in Permutation::all(n) {
        let value = aggregation_objective(x, f, &sigma, weights)?;
        if best.as_ref().is_none_or(|(b, _)| value < *b) {
            best = Some((value, sigma));
        }
    }
    Ok(best.expect("at least one permutation").1)
}

/// Orders documents by `Σ_j w_j xʲ`, the minimizer of `Σ_j w_j d(xʲ || σ)`
/// for nonnegative `w`.
///
/// `features` has one row per document and one column per feature, so
/// column `j` is the feature vector `xʲ` over the documents.
pub fn feature_inference(features: &ScoreMatrix, w: &[f64], rule: TieRule) -> Result<Permutation> {
    check_len(features.n(), w.len())?;
    check_finite(w)?;
    let scores: Vec<f64> = features
        .rows
        .iter()
        .map(|doc| doc.iter().zip(w).map(|(a, b)| a * b).sum())
        .collect();
    induced_ordering(&scores, rule)
}

/// How initial representatives are chosen.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum KMeansInit {
    /// Orderings of `k` distinct rows drawn with the configured seed.
    SampleRows,
    Provided(Vec<Permutation>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KMeansConfig {
    pub k: usize,
    pub init: KMeansInit,
    pub max_iter: usize,
    /// Stop once the objective decreases by less than this.
    pub tol: f64,
    pub seed: u64,
}

impl KMeansConfig {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            init: KMeansInit::SampleRows,
            max_iter: 100,
            tol: 1e-9,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusteringResult {
    /// 0-based cluster index per row.
    pub assignments: Vec<usize>,
    pub representatives: Vec<Permutation>,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Objective after each iteration.
    pub history: Vec<f64>,
}

fn sample_orderings(x: &ScoreMatrix, k: usize, seed: u64) -> Vec<Permutation> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows = x.len();
    let mut unused: Vec<usize> = (0..rows).collect();
    let mut reps: Vec<Permutation> = Vec::with_capacity(k);
    for _ in 0..k {
        let mut chosen = None;
        for _ in 0..rows {
            let slot = rng.random_range(0..unused.len());
            let ordering = ordering_of(x.row(unused[slot]));
            let fresh = !reps.contains(&ordering);
            chosen = Some((slot, ordering));
            if fresh {
                break;
            }
        }
        let (slot, ordering) = chosen.expect("k ≤ rows leaves an unused row");
        unused.swap_remove(slot);
        reps.push(ordering);
    }
    reps
}

fn divergences_to(x: &ScoreMatrix, f: &SetFunction, reps: &[Permutation]) -> Result<Vec<Vec<f64>>> {
    x.rows
        .par_iter()
        .map(|row| {
            reps.iter()
                .map(|s| lb_divergence(f, row, s, TieRule::LowestIndexFirst))
                .collect()
        })
        .collect()
}

/// Lloyd-style clustering: assign each row to its nearest representative
/// ordering, then replace each representative by the ordering of its
/// cluster mean. The objective `Σ_j Σ_{i∈C_j} d(x_i || σ_j)` never increases.
///
/// Empty clusters are reseeded with the row farthest from its current
/// representative (taken from a cluster that keeps at least one member).
pub fn lb_kmeans(x: &ScoreMatrix, f: &SetFunction, config: &KMeansConfig) -> Result<ClusteringResult> {
    let k = config.k;
    if k == 0 || k > x.len() {
        return Err(LbError::InvalidArgument(format!(
            "cluster count {k} must lie in 1..={}",
            x.len()
        )));
    }
    if config.max_iter == 0 {
        return Err(LbError::InvalidArgument("max_iter must be at least 1".into()));
    }
    if config.tol.is_nan() || config.tol < 0.0 {
        return Err(LbError::InvalidArgument("tol must be nonnegative".into()));
    }
    check_len(f.n(), x.n())?;
    let mut reps = match &config.init {
        KMeansInit::SampleRows => sample_orderings(x, k, config.seed),
        KMeansInit::Provided(reps) => {
            check_len(k, reps.len())?;
            for r in reps {
                check_len(x.n(), r.len())?;
            }
            reps.clone()
        }
    };

    let mut assignments = vec![0; x.len()];
    let mut history = Vec::new();
    let mut previous = f64::INFINITY;
    let mut converged = false;
    for _ in 0..config.max_iter {
        // Assignment, lowest cluster index on ties.
        let dist = divergences_to(x, f, &reps)?;
        for (a, row) in assignments.iter_mut().zip(&dist) {
            *a = (0..k).fold(0, |best, j| if row[j] < row[best] { j } else { best });
        }
        let mut sizes = vec![0usize; k];
        for &a in &assignments {
            sizes[a] += 1;
        }
        for j in 0..k {
            if sizes[j] > 0 {
                continue;
            }
            let donor = (0..x.len())
                .filter(|&i| sizes[assignments[i]] > 1)
                .fold(None, |best: Option<usize>, i| match best {
                    Some(b) if dist[b][assignments[b]] >= dist[i][assignments[i]] => Some(b),
                    _ => Some(i),
                })
                .expect("k ≤ rows leaves a cluster with two members");
            sizes[assignments[donor]] -= 1;
            assignments[donor] = j;
            sizes[j] = 1;
        }

        // Update.
        for (j, rep) in reps.iter_mut().enumerate() {
            let members: Vec<Vec<f64>> = (0..x.len())
                .filter(|&i| assignments[i] == j)
                .map(|i| x.rows[i].clone())
                .collect();
            let mu = weighted_mean(&ScoreMatrix { rows: members, row_ids: None }, None)?;
            *rep = ordering_of(&mu);
        }

        let objective = (0..x.len())
            .map(|i| lb_divergence(f, x.row(i), &reps[assignments[i]], TieRule::LowestIndexFirst))
            .sum::<Result<f64>>()?;
        history.push(objective);
        let improvement = previous - objective;
        previous = objective;
        if improvement < config.tol {
            converged = true;
            break;
        }
    }

    Ok(ClusteringResult {
        assignments,
        representatives: reps,
        objective: previous,
        iterations: history.len(),
        converged,
        history,
    })
}
