//! Lovász-Mallows models.
//!
//! [`LovaszMallows`] is a density over scores `x ∈ [0,1]ⁿ`,
//! `p(x | θ, σ) ∝ exp(−θ d(x || σ))`. [`ExtendedLovaszMallows`] is a
//! distribution over permutations given a collection of score vectors,
//! `p(σ | Θ, X) ∝ exp(−Σ_i θ_i d(x_i || σ))`.

use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::aggregate::{weighted_mean, ScoreMatrix};
use crate::divergence::lb_divergence;
use crate::error::{check_finite, check_len, LbError, Result};
use crate::permutation::{ordering_of, Permutation, TieRule};
use crate::submodular::SetFunction;

/// Largest item count for which the permutation partition function is summed
/// exactly.
pub const MAX_EXACT_ITEMS: usize = 8;

/// Minimum Monte-Carlo sample count for [`LovaszMallows::estimate_log_z`].
pub const MIN_SAMPLES: usize = 100;

const CHUNK: usize = 4096;

fn check_concentration(theta: f64) -> Result<()> {
    if theta.is_finite() && theta >= 0.0 {
        Ok(())
    } else {
        Err(LbError::InvalidArgument(format!("concentration {theta} must be finite and nonnegative")))
    }
}

/// Density over the unit cube centred on a reference ordering.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LovaszMallows {
    generator: SetFunction,
    reference: Permutation,
    concentration: f64,
}

/// Monte-Carlo estimate of `log Z` with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogZEstimate {
    pub log_z: f64,
    /// Standard error of the sample mean divided by the mean (delta method).
    pub std_error: f64,
    pub samples: usize,
}

impl LovaszMallows {
    pub fn new(generator: SetFunction, reference: Permutation, concentration: f64) -> Result<Self> {
        check_len(generator.n(), reference.len())?;
        check_concentration(concentration)?;
        Ok(Self {
            generator,
            reference,
            concentration,
        })
    }

    pub fn generator(&self) -> &SetFunction {
        &self.generator
    }

    pub fn reference(&self) -> &Permutation {
        &self.reference
    }

    pub fn concentration(&self) -> f64 {
        self.concentration
    }

    /// `−θ · d(x || σ)` for `x` in the unit cube.
    pub fn log_density_unnormalized(&self, x: &[f64]) -> Result<f64> {
        check_len(self.generator.n(), x.len())?;
        check_finite(x)?;
        if let Some(index) = x.iter().position(|v| !(0.0..=1.0).contains(v)) {
            return Err(LbError::OutsideUnitCube { index: index + 1, value: x[index] });
        }
        if self.concentration == 0.0 {
            return Ok(0.0);
        }
        Ok(-self.concentration * lb_divergence(&self.generator, x, &self.reference, TieRule::LowestIndexFirst)?)
    }

    /// `log ∫_{[0,1]ⁿ} exp(−θ d(x || σ)) dx` by uniform sampling.
    ///
    /// Samples are drawn in fixed chunks of 4096, each from its own ChaCha
    /// stream of `seed`, so the estimate does not depend on the thread count.
    pub fn estimate_log_z(&self, samples: usize, seed: u64) -> Result<LogZEstimate> {
        if samples < MIN_SAMPLES {
            return Err(LbError::InvalidArgument(format!(
                "at least {MIN_SAMPLES} samples are required, got {samples}"
            )));
        }
        let n = self.generator.n();
        let chunks = samples.div_ceil(CHUNK);
        let partials: Vec<(f64, f64)> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(c as u64);
                let count = CHUNK.min(samples - c * CHUNK);
                let mut x = vec![0.0; n];
                let (mut sum, mut sum_sq) = (0.0, 0.0);
                for _ in 0..count {
                    for v in x.iter_mut() {
                        *v = rng.random::<f64>();
                    }
                    let w = if self.concentration == 0.0 {
                        1.0
                    } else {
                        let d = lb_divergence(&self.generator, &x, &self.reference, TieRule::LowestIndexFirst)
                            .expect("validated dimensions");
                        (-self.concentration * d).exp()
                    };
                    sum += w;
                    sum_sq += w * w;
                }
                (sum, sum_sq)
            })
            .collect();
        let (sum, sum_sq) = partials
            .into_iter()
            .fold((0.0, 0.0), |(a, b), (s, q)| (a + s, b + q));
        let count = samples as f64;
        let mean = sum / count;
        let variance = ((sum_sq - count * mean * mean) / (count - 1.0)).max(0.0);
        let se = (variance / count).sqrt();
        Ok(LogZEstimate {
            log_z: mean.ln(),
            std_error: se / mean,
            samples,
        })
    }
}

/// Distribution over permutations combining several score vectors.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExtendedLovaszMallows {
    generator: SetFunction,
    scores: ScoreMatrix,
    concentrations: Vec<f64>,
    #[serde(skip)]
    log_z: OnceLock<f64>,
}

impl PartialEq for ExtendedLovaszMallows {
    fn eq(&self, other: &Self) -> bool {
        self.generator == other.generator
            && self.scores == other.scores
            && self.concentrations == other.concentrations
    }
}

/// Log density of one permutation; unnormalized beyond
/// [`MAX_EXACT_ITEMS`] items.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtendedDensity {
    pub log_density: f64,
    pub normalized: bool,
}

impl ExtendedLovaszMallows {
    pub fn new(generator: SetFunction, scores: ScoreMatrix, concentrations: Vec<f64>) -> Result<Self> {
        check_len(generator.n(), scores.n())?;
        check_len(scores.len(), concentrations.len())?;
        for &t in &concentrations {
            check_concentration(t)?;
        }
        Ok(Self {
            generator,
            scores,
            concentrations,
            log_z: OnceLock::new(),
        })
    }

    pub fn generator(&self) -> &SetFunction {
        &self.generator
    }

    pub fn scores(&self) -> &ScoreMatrix {
        &self.scores
    }

    pub fn concentrations(&self) -> &[f64] {
        &self.concentrations
    }

    /// `Σ_i θ_i d(x_i || σ)`.
    pub fn energy(&self, sigma: &Permutation) -> Result<f64> {
        check_len(self.generator.n(), sigma.len())?;
        let mut total = 0.0;
        for (row, &theta) in self.scores.rows().iter().zip(&self.concentrations) {
            if theta > 0.0 {
                total += theta * lb_divergence(&self.generator, row, sigma, TieRule::LowestIndexFirst)?;
            }
        }
        Ok(total)
    }

    /// `log Σ_σ exp(−energy(σ))`, or `None` above [`MAX_EXACT_ITEMS`] items.
    pub fn log_partition(&self) -> Result<Option<f64>> {
        let n = self.generator.n();
        if n > MAX_EXACT_ITEMS {
            return Ok(None);
        }
        if let Some(&z) = self.log_z.get() {
            return Ok(Some(z));
        }
        let neg: Vec<f64> = Permutation::all(n).map(|s| self.energy(&s).map(|e| -e)).collect::<Result<_>>()?;
        let top = neg.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let z = top + neg.iter().map(|v| (v - top).exp()).sum::<f64>().ln();
        Ok(Some(*self.log_z.get_or_init(|| z)))
    }

    /// `−Σ_i θ_i d(x_i || σ) − log Z(Θ, X)`; the normalizer is omitted (and
    /// `normalized` is false) above [`MAX_EXACT_ITEMS`] items.
    pub fn extended_log_density(&self, sigma: &Permutation) -> Result<ExtendedDensity> {
        let energy = self.energy(sigma)?;
        Ok(match self.log_partition()? {
            Some(z) => ExtendedDensity {
                log_density: -energy - z,
                normalized: true,
            },
            None => ExtendedDensity {
                log_density: -energy,
                normalized: false,
            },
        })
    }

    /// The mode: the ordering of the Θ-weighted mean of the score rows.
    pub fn map_permutation(&self) -> Result<Permutation> {
        if self.concentrations.iter().all(|&t| t == 0.0) {
            return Err(LbError::InvalidArgument(
                "all concentrations are zero; the distribution has no unique mode".into(),
            ));
        }
        Ok(ordering_of(&weighted_mean(&self.scores, Some(&self.concentrations))?))
    }
}
