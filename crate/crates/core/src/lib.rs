//! Lovász-Bregman divergences.
//!
//! A submodular function `f` on items `1..=n` induces, through the greedy
//! subgradients of its Lovász extension, a divergence between a real score
//! vector `x` and a permutation `σ`:
//!
//! ```text
//! d_f(x || σ) = ⟨x, h_{σ_x} − h_σ⟩,   h_σ(σ(j)) = f(S_j) − f(S_{j−1})
//! ```
//!
//! where `σ_x` sorts `x` in descending order and `S_j = {σ(1), …, σ(j)}`.
//! The divergence is nonnegative and vanishes when `σ` sorts `x`.
//!
//! Modules:
//!
//! - [`permutation`]: permutations, score-induced orderings, Kendall tau and
//!   Spearman metrics.
//! - [`submodular`]: set functions (cardinality-based, graph cut, indicator,
//!   explicit table, sums) and exhaustive structural checks.
//! - [`lovasz`]: the Lovász extension and its extreme subgradients.
//! - [`divergence`]: the generic divergence, its closed forms, NDCG and AUC
//!   losses, partial-order distortion and the confidence bound.
//! - [`aggregate`]: mean-ordering rank aggregation, weighted feature
//!   inference, and k-means clustering of score vectors.
//! - [`mallows`]: Lovász-Mallows densities over scores and permutations.
//! - [`io`] and [`generator`]: file formats and generator descriptors shared
//!   by the command line and the Python bindings.
//!
//! Items and ranks are 1-based at every public interface.

pub mod aggregate;
pub mod divergence;
mod error;
pub mod generator;
pub mod io;
pub mod lovasz;
pub mod mallows;
pub mod permutation;
pub mod submodular;

pub use aggregate::{
    aggregation_objective, brute_force_mean, feature_inference, lb_kmeans, mean_ordering,
    ClusteringResult, KMeansConfig, KMeansInit, ScoreMatrix,
};
pub use divergence::{
    auc_loss, confidence_bound, dcg_shortfall, lb_cardinality, lb_cut, lb_divergence, lb_top_m,
    ndcg_loss, partial_order_distortion, DiscountProfile, Orientation, OrderConstraint,
    PartialOrder,
};
pub use error::{LbError, Result};
pub use generator::GeneratorSpec;
pub use lovasz::{
    averaged_subgradient, extreme_subgradient, lovasz_extension, ExtremeSubgradient,
    SubgradientOptions,
};
pub use mallows::{ExtendedDensity, ExtendedLovaszMallows, LogZEstimate, LovaszMallows};
pub use permutation::{
    induced_ordering, kendall_tau, rank_correlation, spearman_footrule, Permutation, TieRule,
};
pub use submodular::{Descriptor, GroundSet, SetFunction, Subset, WeightMatrix};
