//! Equilibration verdicts and the theory-independent sufficiency condition.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::average::{
    distinguishability_series, mean_distribution, sample_trajectory, Estimate, TimeAverageConfig,
};
use crate::distribution::OutcomeDistribution;
use crate::error::{ensure_dim, Error, Result};
use crate::probe::TrajectoryProbe;

/// Multiple of the standard error a verdict must clear.
pub const VERDICT_SIGMAS: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Equilibrates,
    DoesNotEquilibrate,
    /// The estimate is within statistical error of `epsilon`.
    Inconclusive,
}

impl Verdict {
    pub fn decide(estimate: Estimate, epsilon: f64) -> Self {
        let margin = VERDICT_SIGMAS * estimate.standard_error;
        if estimate.mean + margin <= epsilon {
            Verdict::Equilibrates
        } else if estimate.mean - margin > epsilon {
            Verdict::DoesNotEquilibrate
        } else {
            Verdict::Inconclusive
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Equilibrates => "equilibrates",
            Verdict::DoesNotEquilibrate => "does-not-equilibrate",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibrationReport {
    pub mean_distinguishability: f64,
    pub standard_error: f64,
    pub equilibrium_distribution: OutcomeDistribution,
    pub epsilon: f64,
    pub verdict: Verdict,
    /// Analytic bounds evaluated for this run, by name.
    pub bound_values: BTreeMap<String, f64>,
}

impl EquilibrationReport {
    pub fn new(
        estimate: Estimate,
        equilibrium_distribution: OutcomeDistribution,
        epsilon: f64,
    ) -> Result<Self> {
        check_epsilon(epsilon)?;
        Ok(EquilibrationReport {
            mean_distinguishability: estimate.mean.clamp(0.0, 1.0),
            standard_error: estimate.standard_error,
            equilibrium_distribution,
            epsilon,
            verdict: Verdict::decide(estimate, epsilon),
            bound_values: BTreeMap::new(),
        })
    }

    pub fn estimate(&self) -> Estimate {
        Estimate {
            mean: self.mean_distinguishability,
            standard_error: self.standard_error,
        }
    }

    pub fn with_bound(mut self, name: &str, value: f64) -> Self {
        self.bound_values.insert(name.to_string(), value);
        self
    }
}

pub(crate) fn check_epsilon(epsilon: f64) -> Result<()> {
    if (0.0..1.0).contains(&epsilon) {
        Ok(())
    } else {
        Err(Error::domain(format!("epsilon {epsilon} outside [0, 1)")))
    }
}

/// Condition under which any trajectory, in any theory, with equilibrium
/// distribution `omega` equilibrates up to `epsilon`:
/// `max_j ω_j ≥ 1 − ε/2`.
pub fn check_sufficiency(omega: &OutcomeDistribution, epsilon: f64) -> Result<bool> {
    check_epsilon(epsilon)?;
    Ok(omega.max_prob() >= 1.0 - epsilon / 2.0)
}

/// Samples `probe`, estimates `⟨D(p(t), ω)⟩` and decides a verdict.
///
/// With `omega = None` the equilibrium distribution is the empirical time
/// average over the same samples.
pub fn assess<P: TrajectoryProbe + ?Sized>(
    probe: &P,
    omega: Option<&OutcomeDistribution>,
    cfg: &TimeAverageConfig,
    epsilon: f64,
) -> Result<EquilibrationReport> {
    check_epsilon(epsilon)?;
    let samples = sample_trajectory(probe, cfg)?;
    let omega = match omega {
        Some(o) => {
            ensure_dim(probe.outcome_count(), o.len())?;
            o.clone()
        }
        None => mean_distribution(&samples)?,
    };
    let estimate = Estimate::from_series(&distinguishability_series(&samples, &omega)?);
    EquilibrationReport::new(estimate, omega, epsilon)
}
