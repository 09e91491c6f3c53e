//! Outcome distributions and the distinguishability between them.
//!
//! Every measurement in the crate, classical or quantum, is reduced to an
//! [`OutcomeDistribution`]: a probability vector over `N` outcomes.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_dim, Error, Result};

/// Slack allowed on each entry being inside `[0, 1]`.
pub const ENTRY_TOLERANCE: f64 = 1e-12;
/// Slack allowed on the entries summing to one.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

/// Probability vector over the outcomes of one measurement.
///
/// Entries are checked on construction; entries within [`ENTRY_TOLERANCE`]
/// outside `[0, 1]` are clamped into range.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct OutcomeDistribution {
    probs: Vec<f64>,
}

impl OutcomeDistribution {
    pub fn new(mut probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("no outcomes".into()));
        }
        let mut total = 0.0;
        for (j, p) in probs.iter_mut().enumerate() {
            if !p.is_finite() || *p < -ENTRY_TOLERANCE || *p > 1.0 + ENTRY_TOLERANCE {
                return Err(Error::InvalidDistribution(format!(
                    "entry {j} = {p} outside [0, 1]"
                )));
            }
            *p = p.clamp(0.0, 1.0);
            total += *p;
        }
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "entries sum to {total}, not 1"
            )));
        }
        Ok(OutcomeDistribution { probs })
    }

    /// Builds a distribution from non-negative weights, dividing by their sum.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || weights.iter().any(|w| *w < 0.0 || !w.is_finite()) {
            return Err(Error::InvalidDistribution(
                "weights must be non-negative with a positive sum".into(),
            ));
        }
        Self::new(weights.into_iter().map(|w| w / total).collect())
    }

    /// Deterministic outcome `index` out of `outcomes`.
    pub fn indicator(index: usize, outcomes: usize) -> Result<Self> {
        if index >= outcomes {
            return Err(Error::domain(format!(
                "outcome {index} out of range for {outcomes} outcomes"
            )));
        }
        let mut probs = vec![0.0; outcomes];
        probs[index] = 1.0;
        Ok(OutcomeDistribution { probs })
    }

    pub fn uniform(outcomes: usize) -> Result<Self> {
        if outcomes == 0 {
            return Err(Error::InvalidDistribution("no outcomes".into()));
        }
        Ok(OutcomeDistribution {
            probs: vec![1.0 / outcomes as f64; outcomes],
        })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Largest outcome probability, the parameter both the sufficiency and
    /// necessity conditions are stated in.
    pub fn max_prob(&self) -> f64 {
        self.probs.iter().copied().fold(0.0, f64::max)
    }

    /// `Σ_j p_j²`, the collision probability.
    pub fn collision_probability(&self) -> f64 {
        self.probs.iter().map(|p| p * p).sum()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.probs
    }
}

impl<'de> Deserialize<'de> for OutcomeDistribution {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let probs = Vec::<f64>::deserialize(d)?;
        OutcomeDistribution::new(probs).map_err(serde::de::Error::custom)
    }
}

impl AsRef<[f64]> for OutcomeDistribution {
    fn as_ref(&self) -> &[f64] {
        &self.probs
    }
}

/// Half the L1 distance between two outcome distributions.
pub fn distinguishability(p: &OutcomeDistribution, q: &OutcomeDistribution) -> Result<f64> {
    ensure_dim(p.len(), q.len())?;
    Ok(half_l1(p.probs(), q.probs()))
}

pub(crate) fn half_l1(p: &[f64], q: &[f64]) -> f64 {
    let sum: f64 = p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum();
    (0.5 * sum).min(1.0)
}

/// Probability of correctly guessing which of two states was measured,
/// given their distinguishability `d`.
pub fn guessing_probability(d: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&d) {
        return Err(Error::domain(format!(
            "distinguishability {d} outside [0, 1]"
        )));
    }
    Ok(0.5 + 0.5 * d)
}

/// Distinguishability with respect to a set of measurements: the largest
/// distinguishability over the set. Each pair holds the two distributions
/// of one measurement.
pub fn multi_distinguishability(
    pairs: &[(OutcomeDistribution, OutcomeDistribution)],
) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::domain("empty measurement set"));
    }
    pairs.iter().try_fold(
        0.0_f64,
        |acc, (p, q)| Ok(acc.max(distinguishability(p, q)?)),
    )
}

/// Per-measurement tolerance that guarantees `epsilon`-equilibration of the
/// max-distinguishability over `k` measurements.
pub fn multi_measurement_budget(epsilon: f64, k: usize) -> Result<f64> {
    if !(0.0..1.0).contains(&epsilon) {
        return Err(Error::domain(format!("epsilon {epsilon} outside [0, 1)")));
    }
    if k == 0 {
        return Err(Error::domain("at least one measurement is required"));
    }
    Ok(epsilon / k as f64)
}
