//! Time-parametrized outcome distributions.

use crate::distribution::OutcomeDistribution;
use crate::error::{ensure_dim, Result};

/// A state, its time evolution and a measurement, seen only through the
/// outcome distribution at time `t`.
///
/// Implementations must return distributions of length
/// [`outcome_count`](Self::outcome_count) and satisfy `sample(0)` equal to
/// the initial state's distribution.
pub trait TrajectoryProbe: Send + Sync {
    fn outcome_count(&self) -> usize;

    fn sample(&self, t: f64) -> Result<OutcomeDistribution>;

    /// Samples at every time in `times`, in order. Probes with cheap
    /// incremental evolution (iterated maps) override this.
    fn sample_many(&self, times: &[f64]) -> Result<Vec<OutcomeDistribution>> {
        times.iter().map(|&t| self.sample(t)).collect()
    }
}

impl<P: TrajectoryProbe + ?Sized> TrajectoryProbe for &P {
    fn outcome_count(&self) -> usize {
        (**self).outcome_count()
    }
    fn sample(&self, t: f64) -> Result<OutcomeDistribution> {
        (**self).sample(t)
    }
    fn sample_many(&self, times: &[f64]) -> Result<Vec<OutcomeDistribution>> {
        (**self).sample_many(times)
    }
}

impl<P: TrajectoryProbe + ?Sized> TrajectoryProbe for Box<P> {
    fn outcome_count(&self) -> usize {
        (**self).outcome_count()
    }
    fn sample(&self, t: f64) -> Result<OutcomeDistribution> {
        (**self).sample(t)
    }
    fn sample_many(&self, times: &[f64]) -> Result<Vec<OutcomeDistribution>> {
        (**self).sample_many(times)
    }
}

/// Probe backed by a closure returning raw probabilities; each sample is
/// validated as an [`OutcomeDistribution`].
pub struct FnProbe<F> {
    outcomes: usize,
    f: F,
}

impl<F> FnProbe<F>
where
    F: Fn(f64) -> Vec<f64> + Send + Sync,
{
    pub fn new(outcomes: usize, f: F) -> Self {
        FnProbe { outcomes, f }
    }
}

impl<F> TrajectoryProbe for FnProbe<F>
where
    F: Fn(f64) -> Vec<f64> + Send + Sync,
{
    fn outcome_count(&self) -> usize {
        self.outcomes
    }

    fn sample(&self, t: f64) -> Result<OutcomeDistribution> {
        let d = OutcomeDistribution::new((self.f)(t))?;
        ensure_dim(self.outcomes, d.len())?;
        Ok(d)
    }
}

/// A stationary trajectory.
#[derive(Debug, Clone)]
pub struct ConstantProbe(pub OutcomeDistribution);

impl TrajectoryProbe for ConstantProbe {
    fn outcome_count(&self) -> usize {
        self.0.len()
    }

    fn sample(&self, _t: f64) -> Result<OutcomeDistribution> {
        Ok(self.0.clone())
    }
}
