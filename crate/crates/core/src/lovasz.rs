//! The Lovász extension and its extreme subgradients.
//!
//! For an ordering `σ` the greedy vector `h_σ(σ(j)) = f(S_j) − f(S_{j−1})`
//! is an extreme point of the subdifferential of the extension at every `y`
//! ordered consistently with `σ`, and `f̂(y) = ⟨h_{σ_y}, y⟩`.

use crate::error::{check_finite, check_len, LbError, Result};
use crate::permutation::{next_permutation, ordering_of, Permutation};
use crate::submodular::SetFunction;

/// Default cap on the number of tie-consistent orderings that may be
/// enumerated (`8!`).
pub const DEFAULT_ENUMERATION_CAP: usize = 40_320;

/// The greedy marginal-gain vector of a set function along an ordering.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtremeSubgradient {
    values: Vec<f64>,
    order: Permutation,
}

impl ExtremeSubgradient {
    /// Indexed by 0-based item.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn order(&self) -> &Permutation {
        &self.order
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn dot(&self, x: &[f64]) -> f64 {
        dot(&self.values, x)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| u * v).sum()
}

/// Greedy gains of `f` along `order`, indexed by 0-based item.
pub(crate) fn greedy_gains(f: &SetFunction, order: &Permutation) -> Vec<f64> {
    let prefix = f.prefix_values(order.items());
    let mut h = vec![0.0; order.len()];
    for (j, &item) in order.items().iter().enumerate() {
        h[item] = prefix[j + 1] - prefix[j];
    }
    h
}

/// `h^f_σ`.
pub fn extreme_subgradient(f: &SetFunction, order: &Permutation) -> Result<ExtremeSubgradient> {
    check_len(f.n(), order.len())?;
    Ok(ExtremeSubgradient {
        values: greedy_gains(f, order),
        order: order.clone(),
    })
}

/// `f̂(x) = Σ_j x(σ_x(j)) · (f(S_j) − f(S_{j−1}))`, evaluated in the
/// equivalent form `Σ_j (x(σ_x(j)) − x(σ_x(j+1))) · f(S_j)` with
/// `x(σ_x(n+1)) = 0`. Each `f(S_j)` is evaluated directly, so `f̂(1_A)`
/// reproduces `f(A)` exactly.
///
/// Any ordering consistent with `x` gives the same value, so ties are
/// resolved by item index.
pub fn lovasz_extension(f: &SetFunction, x: &[f64]) -> Result<f64> {
    check_len(f.n(), x.len())?;
    check_finite(x)?;
    let order = ordering_of(x);
    let items = order.items();
    let mut members = vec![false; x.len()];
    let mut total = 0.0;
    for (j, &item) in items.iter().enumerate() {
        members[item] = true;
        let next = items.get(j + 1).map_or(0.0, |&i| x[i]);
        let step = x[item] - next;
        if step != 0.0 {
            total += step * f.eval_members(&members);
        }
    }
    Ok(total)
}

/// Options for [`averaged_subgradient`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SubgradientOptions {
    /// Maximum number of tie-consistent orderings to average over.
    pub enumeration_cap: usize,
    /// Return the zero vector at `y = 0` instead of the plain average.
    pub zero_at_origin: bool,
}

impl Default for SubgradientOptions {
    fn default() -> Self {
        Self {
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
            zero_at_origin: false,
        }
    }
}

/// Groups of 0-based items with equal scores, in descending score order.
fn tie_groups(y: &[f64]) -> Vec<Vec<usize>> {
    let order = ordering_of(y);
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &item in order.items() {
        match groups.last_mut() {
            Some(g) if y[g[0]] == y[item] => g.push(item),
            _ => groups.push(vec![item]),
        }
    }
    groups
}

/// Number of orderings consistent with `y`, `Π |group|!`, saturating.
pub fn count_consistent_orderings(y: &[f64]) -> u128 {
    tie_groups(y)
        .iter()
        .flat_map(|g| 1..=g.len() as u128)
        .try_fold(1u128, |acc, k| acc.checked_mul(k))
        .unwrap_or(u128::MAX)
}

/// Every ordering `σ` with `y(σ(1)) ≥ … ≥ y(σ(n))`, failing when there are
/// more than `cap` of them.
pub fn consistent_orderings(y: &[f64], cap: usize) -> Result<Vec<Permutation>> {
    if y.is_empty() {
        return Err(LbError::InvalidArgument("empty score vector".into()));
    }
    check_finite(y)?;
    let count = count_consistent_orderings(y);
    if count > cap as u128 {
        return Err(LbError::EnumerationCap { count, cap });
    }
    let groups = tie_groups(y);
    // Odometer over the arrangements of each tie group.
    let mut arrangement: Vec<Vec<usize>> = groups.iter().map(|g| (0..g.len()).collect()).collect();
    let mut out = Vec::with_capacity(count as usize);
    loop {
        let items = groups
            .iter()
            .zip(&arrangement)
            .flat_map(|(g, a)| a.iter().map(move |&k| g[k]))
            .collect();
        out.push(Permutation::from_zero_based(items));
        let mut advanced = false;
        for a in arrangement.iter_mut().rev() {
            if next_permutation(a) {
                advanced = true;
                break;
            }
            a.sort_unstable();
        }
        if !advanced {
            return Ok(out);
        }
    }
}

/// Mean of `h^f_σ` over all orderings consistent with `y`.
///
/// Equals [`extreme_subgradient`] at `σ_y` when `y` has no ties. With
/// `zero_at_origin`, the all-zero `y` maps to the zero vector; other vectors
/// with zero entries use the plain average.
pub fn averaged_subgradient(f: &SetFunction, y: &[f64], opts: SubgradientOptions) -> Result<Vec<f64>> {
    check_len(f.n(), y.len())?;
    if opts.zero_at_origin && y.iter().all(|&v| v == 0.0) {
        return Ok(vec![0.0; y.len()]);
    }
    let orders = consistent_orderings(y, opts.enumeration_cap)?;
    let mut acc = vec![0.0; y.len()];
    for order in &orders {
        for (a, h) in acc.iter_mut().zip(greedy_gains(f, order)) {
            *a += h;
        }
    }
    let count = orders.len() as f64;
    Ok(acc.into_iter().map(|a| a / count).collect())
}

/// Largest ground set for [`has_distinct_extreme_points`].
pub const MAX_EXTREME_POINT_ITEMS: usize = 8;

/// Whether all `n!` greedy subgradients are pairwise distinct (beyond an
/// absolute 1e-9 in some coordinate).
///
/// Used as a checkable stand-in for "the base polytope has all possible
/// extreme points", the condition under which `d(x||σ) = 0` forces `σ = σ_x`
/// for untied `x`.
pub fn has_distinct_extreme_points(f: &SetFunction) -> Result<bool> {
    let n = f.n();
    if n > MAX_EXTREME_POINT_ITEMS {
        return Err(LbError::GroundSetTooLarge {
            n,
            max: MAX_EXTREME_POINT_ITEMS,
        });
    }
    let mut points: Vec<Vec<f64>> = Permutation::all(n).map(|p| greedy_gains(f, &p)).collect();
    points.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .map(|(u, v)| u.total_cmp(v))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    // Near-equal vectors need not be adjacent after a lexicographic sort, so
    // compare all pairs.
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if points[i].iter().zip(&points[j]).all(|(u, v)| (u - v).abs() <= 1e-9) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
