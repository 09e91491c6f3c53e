//! Finite-horizon estimators for infinite-time averages.
//!
//! The time average `⟨f⟩ = lim (1/T)∫₀ᵀ f dt` is approximated by the mean of
//! `f` at `samples` times in `[0, horizon)`. The reported standard error is
//! the sample standard deviation over `√samples`. This treats the samples as
//! independent, which is a heuristic: it is conservative for stratified
//! sampling of smooth quasi-periodic signals and says nothing about the bias
//! from stopping at a finite horizon.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::distribution::{half_l1, OutcomeDistribution};
use crate::error::{ensure_dim, Error, Result};
use crate::probe::TrajectoryProbe;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplingScheme {
    /// `t_k = k·T/M`.
    UniformGrid,
    /// One uniform draw inside each of the `M` equal sub-intervals.
    #[default]
    StratifiedRandom,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeAverageConfig {
    pub horizon: f64,
    pub samples: usize,
    #[serde(default)]
    pub scheme: SamplingScheme,
    #[serde(default)]
    pub seed: u64,
}

impl TimeAverageConfig {
    pub fn new(horizon: f64, samples: usize, scheme: SamplingScheme, seed: u64) -> Result<Self> {
        let cfg = TimeAverageConfig {
            horizon,
            samples,
            scheme,
            seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Grid over integer steps `0..steps`, the natural average for maps.
    pub fn steps(steps: usize) -> Result<Self> {
        Self::new(steps as f64, steps, SamplingScheme::UniformGrid, 0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(Error::domain(format!(
                "horizon must be finite and positive, got {}",
                self.horizon
            )));
        }
        if self.samples < 2 {
            return Err(Error::domain(format!(
                "at least 2 samples are required, got {}",
                self.samples
            )));
        }
        Ok(())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Sample times in increasing order.
    pub fn sample_times(&self) -> Result<Vec<f64>> {
        self.validate()?;
        let dt = self.horizon / self.samples as f64;
        Ok(match self.scheme {
            SamplingScheme::UniformGrid => (0..self.samples).map(|k| k as f64 * dt).collect(),
            SamplingScheme::StratifiedRandom => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                (0..self.samples)
                    .map(|k| (k as f64 + rng.random::<f64>()) * dt)
                    .collect()
            }
        })
    }
}

/// A mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub standard_error: f64,
}

impl Estimate {
    /// Mean and standard error of a series, summed in order with
    /// compensation so the result does not depend on how the series was
    /// produced.
    pub fn from_series(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return Estimate {
                mean: f64::NAN,
                standard_error: f64::NAN,
            };
        }
        let mean = compensated_sum(values.iter().copied()) / n as f64;
        if n < 2 {
            return Estimate {
                mean,
                standard_error: 0.0,
            };
        }
        let ss = compensated_sum(values.iter().map(|v| (v - mean) * (v - mean)));
        let variance = ss / (n - 1) as f64;
        Estimate {
            mean,
            standard_error: (variance / n as f64).sqrt(),
        }
    }
}

/// Neumaier-compensated sum, evaluated left to right.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Evaluates `probe` at every sample time of `cfg`.
pub fn sample_trajectory<P: TrajectoryProbe + ?Sized>(
    probe: &P,
    cfg: &TimeAverageConfig,
) -> Result<Vec<OutcomeDistribution>> {
    let times = cfg.sample_times()?;
    let samples = probe.sample_many(&times)?;
    ensure_dim(times.len(), samples.len())?;
    for s in &samples {
        ensure_dim(probe.outcome_count(), s.len())?;
    }
    Ok(samples)
}

/// Per-outcome mean of a list of distributions, renormalized to sum to one.
pub fn mean_distribution(samples: &[OutcomeDistribution]) -> Result<OutcomeDistribution> {
    let first = samples
        .first()
        .ok_or_else(|| Error::domain("no samples to average"))?;
    let n = first.len();
    let count = samples.len() as f64;
    let mut means = Vec::with_capacity(n);
    for j in 0..n {
        let mut column = Vec::with_capacity(samples.len());
        for s in samples {
            ensure_dim(n, s.len())?;
            column.push(s.probs()[j]);
        }
        means.push(compensated_sum(column) / count);
    }
    let total = compensated_sum(means.iter().copied());
    OutcomeDistribution::new(means.into_iter().map(|m| m / total).collect())
}

/// `D(p(t_k), ω)` for every sample.
pub fn distinguishability_series(
    samples: &[OutcomeDistribution],
    omega: &OutcomeDistribution,
) -> Result<Vec<f64>> {
    samples
        .iter()
        .map(|s| {
            ensure_dim(omega.len(), s.len())?;
            Ok(half_l1(s.probs(), omega.probs()))
        })
        .collect()
}

/// Finite-horizon estimate of the equilibrium distribution `⟨p(t)⟩`.
pub fn time_average_distribution<P: TrajectoryProbe + ?Sized>(
    probe: &P,
    cfg: &TimeAverageConfig,
) -> Result<OutcomeDistribution> {
    mean_distribution(&sample_trajectory(probe, cfg)?)
}

/// Finite-horizon estimate of `⟨D(p(t), ω)⟩`.
pub fn average_distinguishability<P: TrajectoryProbe + ?Sized>(
    probe: &P,
    omega: &OutcomeDistribution,
    cfg: &TimeAverageConfig,
) -> Result<Estimate> {
    ensure_dim(probe.outcome_count(), omega.len())?;
    let samples = sample_trajectory(probe, cfg)?;
    Ok(Estimate::from_series(&distinguishability_series(
        &samples, omega,
    )?))
}

/// Time averages for a set of measurements probed at the same times.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiAverage {
    /// `⟨max_i D_i(t)⟩`.
    pub max: Estimate,
    /// `⟨D_i(t)⟩` for each measurement.
    pub per_measurement: Vec<Estimate>,
}

impl MultiAverage {
    /// `Σ_i ⟨D_i⟩`, the upper end of the max ≤ sum chain.
    pub fn sum_of_means(&self) -> f64 {
        compensated_sum(self.per_measurement.iter().map(|e| e.mean))
    }
}

/// Time-averaged max-distinguishability over several measurements of the
/// same trajectory. `omegas[i]` is the reference distribution of probe `i`;
/// `None` uses the empirical time average of that probe.
pub fn multi_average_distinguishability(
    probes: &[&dyn TrajectoryProbe],
    omegas: Option<&[OutcomeDistribution]>,
    cfg: &TimeAverageConfig,
) -> Result<MultiAverage> {
    if probes.is_empty() {
        return Err(Error::domain("empty measurement set"));
    }
    if let Some(o) = omegas {
        ensure_dim(probes.len(), o.len())?;
    }
    let mut series = Vec::with_capacity(probes.len());
    for (i, probe) in probes.iter().enumerate() {
        let samples = sample_trajectory(*probe, cfg)?;
        let omega = match omegas {
            Some(o) => o[i].clone(),
            None => mean_distribution(&samples)?,
        };
        series.push(distinguishability_series(&samples, &omega)?);
    }
    let len = series[0].len();
    let max_series: Vec<f64> = (0..len)
        .map(|k| series.iter().map(|s| s[k]).fold(0.0, f64::max))
        .collect();
    Ok(MultiAverage {
        max: Estimate::from_series(&max_series),
        per_measurement: series.iter().map(|s| Estimate::from_series(s)).collect(),
    })
}
