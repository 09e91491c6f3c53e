//! Random trajectories with no underlying physics.
//!
//! Used to test statements that hold for any dynamics, such as the
//! sufficiency condition.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::distribution::OutcomeDistribution;
use crate::error::{Error, Result};
use crate::probe::TrajectoryProbe;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SyntheticKind {
    /// Softmax of random sums of sinusoids with incommensurate frequencies.
    Trigonometric,
    /// Jumps between a fixed palette of random distributions once per unit
    /// time, the palette entry drawn independently per slot.
    Telegraph,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSpec {
    pub kind: SyntheticKind,
    pub outcomes: usize,
    /// Sinusoids per outcome, or palette size for telegraph probes.
    #[serde(default = "default_components")]
    pub components: usize,
    /// Weight mixed into outcome 0: `p = (1 − bias) q + bias e_0`.
    #[serde(default)]
    pub bias: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_components() -> usize {
    3
}

impl SyntheticSpec {
    pub fn new(kind: SyntheticKind, outcomes: usize) -> Self {
        SyntheticSpec {
            kind,
            outcomes,
            components: default_components(),
            bias: 0.0,
            seed: 0,
        }
    }

    pub fn with_bias(mut self, bias: f64) -> Self {
        self.bias = bias;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

#[derive(Debug, Clone)]
enum Recipe {
    Trig {
        offsets: Vec<f64>,
        // per outcome: (amplitude, frequency, phase)
        waves: Vec<Vec<(f64, f64, f64)>>,
    },
    Telegraph {
        palette: Vec<Vec<f64>>,
    },
}

#[derive(Debug, Clone)]
pub struct SyntheticProbe {
    outcomes: usize,
    bias: f64,
    seed: u64,
    recipe: Recipe,
}

pub fn synthetic_probe(spec: &SyntheticSpec) -> Result<SyntheticProbe> {
    if spec.outcomes == 0 || spec.components == 0 {
        return Err(Error::domain(
            "outcome and component counts must be positive",
        ));
    }
    if !(0.0..=1.0).contains(&spec.bias) {
        return Err(Error::domain(format!("bias {} outside [0, 1]", spec.bias)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.outcomes;
    let recipe = match spec.kind {
        SyntheticKind::Trigonometric => Recipe::Trig {
            offsets: (0..n).map(|_| rng.random_range(-1.0..1.0)).collect(),
            waves: (0..n)
                .map(|_| {
                    (0..spec.components)
                        .map(|_| {
                            (
                                rng.random_range(0.0..2.0),
                                rng.random_range(0.05..3.0),
                                rng.random_range(0.0..std::f64::consts::TAU),
                            )
                        })
                        .collect()
                })
                .collect(),
        },
        SyntheticKind::Telegraph => Recipe::Telegraph {
            palette: (0..spec.components)
                .map(|_| {
                    let w: Vec<f64> = (0..n).map(|_| -(-rng.random::<f64>()).ln_1p()).collect();
                    let s: f64 = w.iter().sum();
                    w.into_iter().map(|x| x / s).collect()
                })
                .collect(),
        },
    };
    Ok(SyntheticProbe {
        outcomes: n,
        bias: spec.bias,
        seed: spec.seed,
        recipe,
    })
}

impl SyntheticProbe {
    fn raw(&self, t: f64) -> Vec<f64> {
        match &self.recipe {
            Recipe::Trig { offsets, waves } => {
                let logits: Vec<f64> = offsets
                    .iter()
                    .zip(waves)
                    .map(|(b, w)| {
                        b + w
                            .iter()
                            .map(|(a, f, ph)| a * (f * t + ph).sin())
                            .sum::<f64>()
                    })
                    .collect();
                let top = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let e: Vec<f64> = logits.iter().map(|l| (l - top).exp()).collect();
                let s: f64 = e.iter().sum();
                e.into_iter().map(|x| x / s).collect()
            }
            Recipe::Telegraph { palette } => {
                let slot = t.floor() as i64 as u64;
                let mut rng =
                    ChaCha8Rng::seed_from_u64(self.seed ^ slot.wrapping_mul(0x9E37_79B9_7F4A_7C15));
                palette[rng.random_range(0..palette.len())].clone()
            }
        }
    }
}

impl TrajectoryProbe for SyntheticProbe {
    fn outcome_count(&self) -> usize {
        self.outcomes
    }

    fn sample(&self, t: f64) -> Result<OutcomeDistribution> {
        if !t.is_finite() {
            return Err(Error::domain(format!("time {t} is not finite")));
        }
        let mut p = self.raw(t);
        for x in p.iter_mut() {
            *x *= 1.0 - self.bias;
        }
        p[0] += self.bias;
        OutcomeDistribution::new(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_are_distributions_and_deterministic() {
        for kind in [SyntheticKind::Trigonometric, SyntheticKind::Telegraph] {
            let spec = SyntheticSpec::new(kind, 4).with_seed(11).with_bias(0.3);
            let a = synthetic_probe(&spec).unwrap();
            let b = synthetic_probe(&spec).unwrap();
            for k in 0..100 {
                let t = k as f64 * 0.73 - 20.0;
                let (p, q) = (a.sample(t).unwrap(), b.sample(t).unwrap());
                assert_eq!(p, q);
                assert!(p.probs()[0] >= 0.3 - 1e-12);
            }
        }
    }

    #[test]
    fn telegraph_is_constant_within_a_slot() {
        let p =
            synthetic_probe(&SyntheticSpec::new(SyntheticKind::Telegraph, 3).with_seed(2)).unwrap();
        assert_eq!(p.sample(5.1).unwrap(), p.sample(5.9).unwrap());
    }

    #[test]
    fn full_bias_is_stationary() {
        let p =
            synthetic_probe(&SyntheticSpec::new(SyntheticKind::Trigonometric, 3).with_bias(1.0))
                .unwrap();
        assert_eq!(p.sample(1.0).unwrap().probs(), &[1.0, 0.0, 0.0]);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(synthetic_probe(&SyntheticSpec::new(SyntheticKind::Telegraph, 0)).is_err());
        assert!(
            synthetic_probe(&SyntheticSpec::new(SyntheticKind::Telegraph, 2).with_bias(1.5))
                .is_err()
        );
    }
}
