use rand::Rng;
use serde::{Deserialize, Serialize};

use super::map::PhasePoint;
use crate::error::{ensure_dim, Error, Result};

/// Weighted point cloud standing in for a smooth phase-space density.
///
/// The cloud is a quadrature of the density: averages over it carry a
/// sampling error of order `1/√effective_size`, which the ensemble
/// estimators report alongside the time-sampling error. `chaotic_flags`
/// marks the points taken to lie in the chaotic subspace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalEnsemble {
    points: Vec<PhasePoint>,
    weights: Vec<f64>,
    chaotic_flags: Vec<bool>,
}

impl ClassicalEnsemble {
    pub fn new(
        points: Vec<PhasePoint>,
        weights: Vec<f64>,
        chaotic_flags: Vec<bool>,
    ) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidSystem("empty ensemble".into()));
        }
        ensure_dim(points.len(), weights.len())?;
        ensure_dim(points.len(), chaotic_flags.len())?;
        let dim = points[0].dim();
        for p in &points {
            ensure_dim(dim, p.dim())?;
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidSystem("weights must be non-negative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidSystem(format!(
                "weights sum to {total}, not 1"
            )));
        }
        Ok(ClassicalEnsemble {
            points,
            weights,
            chaotic_flags,
        })
    }

    /// Equal weights.
    pub fn uniform(points: Vec<PhasePoint>, chaotic_flags: Vec<bool>) -> Result<Self> {
        let w = 1.0 / points.len().max(1) as f64;
        let weights = vec![w; points.len()];
        Self::new(points, weights, chaotic_flags)
    }

    pub fn points(&self) -> &[PhasePoint] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn chaotic_flags(&self) -> &[bool] {
        &self.chaotic_flags
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    /// Weight outside the chaotic subspace (the `δ` of the mixed-state bound).
    pub fn non_chaotic_weight(&self) -> f64 {
        self.weights
            .iter()
            .zip(&self.chaotic_flags)
            .filter(|(_, c)| !**c)
            .map(|(w, _)| w)
            .sum()
    }

    /// `1 / Σ w_i²`; equals the point count for equal weights.
    pub fn effective_size(&self) -> f64 {
        1.0 / self.weights.iter().map(|w| w * w).sum::<f64>()
    }
}

/// Uniformly random points on the 2-torus, with a fraction `delta` of them
/// replaced by points of the dyadic lattice `(2^-periodic_bits ℤ)²`.
///
/// Dyadic points lie on short periodic orbits of the cat map (period
/// dividing `3·2^(bits-1)`), and floating point iterates them exactly. Those
/// points are flagged non-chaotic.
pub fn contaminated_torus_ensemble<R: Rng + ?Sized>(
    points: usize,
    delta: f64,
    periodic_bits: u32,
    rng: &mut R,
) -> Result<ClassicalEnsemble> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::domain(format!("delta {delta} outside [0, 1]")));
    }
    if !(1..=8).contains(&periodic_bits) {
        return Err(Error::domain("periodic_bits must be in 1..=8"));
    }
    let periodic = (delta * points as f64).round() as usize;
    let grid = 1u32 << periodic_bits;
    let mut pts = Vec::with_capacity(points);
    let mut flags = Vec::with_capacity(points);
    for i in 0..points {
        if i < periodic {
            let a = rng.random_range(0..grid) as f64 / grid as f64;
            let b = rng.random_range(0..grid) as f64 / grid as f64;
            pts.push(PhasePoint::new(vec![a, b])?);
            flags.push(false);
        } else {
            pts.push(PhasePoint::new(vec![rng.random(), rng.random()])?);
            flags.push(true);
        }
    }
    ClassicalEnsemble::uniform(pts, flags)
}
