//! Purification with a null ancilla Hamiltonian.

use num_complex::Complex64;

use super::linalg::{kron, CMatrix, CVector};
use super::spectrum::HamiltonianSpectrum;
use super::state::DensityMatrix;
use crate::error::{Error, Result};

const NEGLIGIBLE_WEIGHT: f64 = 1e-13;

/// `|Ψ⟩ = Σ_k √λ_k |φ_k⟩ ⊗ |k⟩` on system ⊗ ancilla, both of dimension `d`.
#[derive(Debug, Clone)]
pub struct Purification {
    pub vector: CVector,
    pub system_dim: usize,
    pub ancilla_dim: usize,
}

impl Purification {
    pub fn state(&self) -> DensityMatrix {
        DensityMatrix::new_unchecked(super::linalg::outer(&self.vector))
    }

    /// `H ⊗ 1` on the doubled space.
    pub fn extend_hamiltonian(&self, h: &HamiltonianSpectrum) -> Result<HamiltonianSpectrum> {
        extend_hamiltonian(h, self.ancilla_dim)
    }
}

/// Eigenvalues are taken in decreasing order, so a pure state is paired with
/// the ancilla state `|0⟩`.
pub fn purify(rho: &DensityMatrix) -> Result<Purification> {
    let d = rho.dim();
    let (values, vectors) = rho.eigen()?;
    let mut psi = CVector::zeros(d * d);
    for (k, idx) in (0..d).rev().enumerate() {
        // eigenvalues at rounding level are zero; their square roots are not
        if values[idx] < NEGLIGIBLE_WEIGHT {
            continue;
        }
        let w = values[idx].sqrt();
        for i in 0..d {
            psi[i * d + k] += vectors[(i, idx)] * w;
        }
    }
    let norm = psi.norm();
    if !(norm > 0.0) {
        return Err(Error::Numeric("purification has zero norm".into()));
    }
    Ok(Purification {
        vector: psi.unscale(norm),
        system_dim: d,
        ancilla_dim: d,
    })
}

/// `H ⊗ 1_A`, keeping the eigenspace grouping of `h`.
pub fn extend_hamiltonian(
    h: &HamiltonianSpectrum,
    ancilla_dim: usize,
) -> Result<HamiltonianSpectrum> {
    if ancilla_dim == 0 {
        return Err(Error::domain("ancilla dimension must be positive"));
    }
    let values: Vec<f64> = h
        .eigenvalues()
        .iter()
        .flat_map(|&e| std::iter::repeat(e).take(ancilla_dim))
        .collect();
    let vectors = kron(
        h.eigenvectors(),
        &CMatrix::identity(ancilla_dim, ancilla_dim),
    );
    HamiltonianSpectrum::from_eigen(values, vectors, Some(h.degeneracy_tol()))
}

/// `tr_A m` for an operator on system ⊗ ancilla.
pub fn partial_trace_ancilla(
    m: &CMatrix,
    system_dim: usize,
    ancilla_dim: usize,
) -> Result<CMatrix> {
    crate::error::ensure_dim(system_dim * ancilla_dim, m.nrows())?;
    crate::error::ensure_dim(system_dim * ancilla_dim, m.ncols())?;
    Ok(CMatrix::from_fn(system_dim, system_dim, |i, j| {
        (0..ancilla_dim)
            .map(|a| m[(i * ancilla_dim + a, j * ancilla_dim + a)])
            .sum::<Complex64>()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probe::TrajectoryProbe;
    use crate::quantum::dynamics::{effective_dimension, quantum_probe};
    use crate::quantum::linalg::{max_abs, outer};
    use crate::quantum::spectrum::max_gap_degeneracy;
    use crate::quantum::state::{c, Povm};

    #[test]
    fn pure_state_pairs_with_ancilla_zero() {
        let psi = CVector::from_vec(vec![c(0.6), Complex64::new(0.0, 0.8)]);
        let rho = DensityMatrix::pure(&psi).unwrap();
        let p = purify(&rho).unwrap();
        let mut anc = CMatrix::zeros(2, 2);
        anc[(0, 0)] = c(1.0);
        let expected = kron(rho.matrix(), &anc);
        assert!(max_abs(&(p.state().matrix() - expected)) < 1e-12);
    }

    #[test]
    fn maximally_mixed_qubit_gives_bell_state() {
        let rho = DensityMatrix::maximally_mixed(2).unwrap();
        let p = purify(&rho).unwrap();
        assert!((p.state().purity() - 1.0).abs() < 1e-12);
        let reduced = partial_trace_ancilla(p.state().matrix(), 2, 2).unwrap();
        assert!(max_abs(&(reduced - rho.matrix())) < 1e-12);
        // Schmidt coefficients both 1/2
        let coeffs = CMatrix::from_fn(2, 2, |i, a| p.vector[i * 2 + a]);
        let s = (coeffs.adjoint() * &coeffs).map(|z| z.re);
        assert!((s[(0, 0)] - 0.5).abs() < 1e-12 && (s[(1, 1)] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn trajectories_and_quantities_agree() {
        let rho = DensityMatrix::new(CMatrix::from_fn(3, 3, |i, j| {
            if i == j {
                c([0.5, 0.3, 0.2][i])
            } else {
                Complex64::new(0.05, 0.02 * (i as f64 - j as f64))
            }
        }))
        .unwrap();
        let h = HamiltonianSpectrum::diagonal(&[0.0, 1.0, 2.0]).unwrap();
        let v = CVector::from_vec(vec![c(1.0), c(1.0), c(1.0)]);
        let m0 = outer(&v).unscale(3.0);
        let povm = Povm::new(vec![m0.clone(), CMatrix::identity(3, 3) - m0]).unwrap();
        let p = purify(&rho).unwrap();
        assert!(
            max_abs(&(partial_trace_ancilla(p.state().matrix(), 3, 3).unwrap() - rho.matrix()))
                < 1e-12
        );
        let h2 = p.extend_hamiltonian(&h).unwrap();
        assert_eq!(h2.eigenspace_count(), h.eigenspace_count());
        assert_eq!(
            max_gap_degeneracy(&h, 1e-9).unwrap(),
            max_gap_degeneracy(&h2, 1e-9).unwrap()
        );
        let (a, b) = (
            effective_dimension(&rho, &h).unwrap(),
            effective_dimension(&p.state(), &h2).unwrap(),
        );
        assert!((a - b).abs() < 1e-12);
        let q1 = quantum_probe(&rho, &h, &povm).unwrap();
        let q2 = quantum_probe(&p.state(), &h2, &povm.tensor_identity(3)).unwrap();
        for k in 0..50 {
            let t = 0.37 * k as f64;
            let (x, y) = (q1.sample(t).unwrap(), q2.sample(t).unwrap());
            for j in 0..2 {
                assert!((x.probs()[j] - y.probs()[j]).abs() < 1e-9);
            }
        }
    }
}
