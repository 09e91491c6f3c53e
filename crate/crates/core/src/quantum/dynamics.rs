use num_complex::Complex64;

use super::linalg::{CMatrix, ZERO};
use super::spectrum::HamiltonianSpectrum;
use super::state::{DensityMatrix, Povm};
use crate::distribution::OutcomeDistribution;
use crate::error::{ensure_dim, Error, Result};
use crate::probe::TrajectoryProbe;

/// `ρ(t) = e^{-iHt} ρ e^{iHt}`: the energy-basis element `ρ_nm` picks up the
/// phase `e^{-i(E_n − E_m)t}`.
pub fn evolve_density(
    rho: &DensityMatrix,
    h: &HamiltonianSpectrum,
    t: f64,
) -> Result<DensityMatrix> {
    let mut r = h.to_energy_basis(rho.matrix())?;
    let phases = level_phases(h, t);
    for n in 0..h.dim() {
        for m in 0..h.dim() {
            r[(n, m)] *= phases[n] * phases[m].conj();
        }
    }
    Ok(DensityMatrix::new_unchecked(h.from_energy_basis(&r)))
}

fn level_phases(h: &HamiltonianSpectrum, t: f64) -> Vec<Complex64> {
    (0..h.dim())
        .map(|n| Complex64::from_polar(1.0, -h.level_energy(n) * t))
        .collect()
}

/// Infinite-time average of `ρ(t)`: `ω = Σ_a Π_a ρ Π_a` over eigenspaces.
pub fn dephase(rho: &DensityMatrix, h: &HamiltonianSpectrum) -> Result<DensityMatrix> {
    let mut r = h.to_energy_basis(rho.matrix())?;
    for n in 0..h.dim() {
        for m in 0..h.dim() {
            if h.eigenspace_of(n) != h.eigenspace_of(m) {
                r[(n, m)] = ZERO;
            }
        }
    }
    Ok(DensityMatrix::new_unchecked(h.from_energy_basis(&r)))
}

/// Populations `tr(Π_a ρ)` of each eigenspace.
pub fn eigenspace_weights(rho: &DensityMatrix, h: &HamiltonianSpectrum) -> Result<Vec<f64>> {
    let r = h.to_energy_basis(rho.matrix())?;
    Ok(h.eigenspaces()
        .iter()
        .map(|range| range.clone().map(|n| r[(n, n)].re).sum())
        .collect())
}

/// `1 / Σ_a tr(Π_a ρ)²`.
pub fn effective_dimension(rho: &DensityMatrix, h: &HamiltonianSpectrum) -> Result<f64> {
    let w = eigenspace_weights(rho, h)?;
    Ok(1.0 / w.iter().map(|x| x * x).sum::<f64>())
}

/// Outcome probabilities of `povm` on the evolving state.
///
/// Each probability is `p_j(t) = Re Σ_nm C^j_nm e^{-i(E_n − E_m)t}` with
/// `C^j_nm = (M_j)_mn ρ_nm` in the energy basis, precomputed once.
#[derive(Debug, Clone)]
pub struct QuantumProbe {
    energies: Vec<f64>,
    coefficients: Vec<CMatrix>,
}

pub fn quantum_probe(
    rho: &DensityMatrix,
    h: &HamiltonianSpectrum,
    povm: &Povm,
) -> Result<QuantumProbe> {
    ensure_dim(h.dim(), povm.dim())?;
    let r = h.to_energy_basis(rho.matrix())?;
    let d = h.dim();
    let coefficients = povm
        .elements()
        .iter()
        .map(|m| {
            let me = h.to_energy_basis(m)?;
            Ok(CMatrix::from_fn(d, d, |n, k| me[(k, n)] * r[(n, k)]))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(QuantumProbe {
        energies: (0..d).map(|n| h.level_energy(n)).collect(),
        coefficients,
    })
}

impl QuantumProbe {
    fn raw(&self, t: f64) -> Vec<f64> {
        let z: Vec<Complex64> = self
            .energies
            .iter()
            .map(|e| Complex64::from_polar(1.0, -e * t))
            .collect();
        let d = z.len();
        self.coefficients
            .iter()
            .map(|c| {
                let mut acc = 0.0;
                for n in 0..d {
                    let mut row = ZERO;
                    for m in 0..d {
                        row += c[(n, m)] * z[m].conj();
                    }
                    acc += (z[n] * row).re;
                }
                acc
            })
            .collect()
    }
}

impl TrajectoryProbe for QuantumProbe {
    fn outcome_count(&self) -> usize {
        self.coefficients.len()
    }

    fn sample(&self, t: f64) -> Result<OutcomeDistribution> {
        if !t.is_finite() {
            return Err(Error::domain(format!("time {t} is not finite")));
        }
        OutcomeDistribution::new(self.raw(t))
    }
}

/// Outcome distribution of the dephased state.
pub fn equilibrium_distribution(
    rho: &DensityMatrix,
    h: &HamiltonianSpectrum,
    povm: &Povm,
) -> Result<OutcomeDistribution> {
    povm.probabilities(&dephase(rho, h)?)
}

/// Upper bound `½ √(D_G (N − 1) / d_eff)` on the time-averaged
/// distinguishability for an `N`-outcome measurement.
pub fn quantum_bound(outcomes: usize, gap_degeneracy: usize, d_eff: f64) -> Result<f64> {
    check_bound_args(outcomes, gap_degeneracy, d_eff)?;
    Ok(0.5 * (gap_degeneracy as f64 * (outcomes - 1) as f64 / d_eff).sqrt())
}

/// `½ √(D_G N / d_eff)`: the same argument without shifting each POVM element
/// by a multiple of the identity. Always at least [`quantum_bound`].
pub fn quantum_bound_unshifted(outcomes: usize, gap_degeneracy: usize, d_eff: f64) -> Result<f64> {
    check_bound_args(outcomes, gap_degeneracy, d_eff)?;
    Ok(0.5 * (gap_degeneracy as f64 * outcomes as f64 / d_eff).sqrt())
}

fn check_bound_args(outcomes: usize, gap_degeneracy: usize, d_eff: f64) -> Result<()> {
    if outcomes == 0 || gap_degeneracy == 0 {
        return Err(Error::domain("outcome count and D_G must be at least 1"));
    }
    // d_eff ≥ 1 up to the trace tolerance of the state
    if !(d_eff >= 1.0 - 1e-8) || !d_eff.is_finite() {
        return Err(Error::domain(format!(
            "effective dimension {d_eff} below 1"
        )));
    }
    Ok(())
}

/// Largest outcome count `N ≤ 4 (d_eff / D_G) ε² + 1` for which the quantum
/// bound guarantees `ε`-equilibration.
pub fn max_outcomes_for_equilibration(
    epsilon: f64,
    d_eff: f64,
    gap_degeneracy: usize,
) -> Result<usize> {
    crate::report::check_epsilon(epsilon)?;
    check_bound_args(1, gap_degeneracy, d_eff)?;
    let x = 4.0 * d_eff * epsilon * epsilon / gap_degeneracy as f64 + 1.0;
    // absorb rounding in products such as 4·100·0.1² = 4.000000000000001
    Ok((x * (1.0 + 1e-12)).floor() as usize)
}
