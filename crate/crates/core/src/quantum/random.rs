//! Seeded random instances: unitaries, states, spectra and measurements.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::linalg::{hermitian_eigen, hermitian_part, CMatrix, CVector};
use super::spectrum::HamiltonianSpectrum;
use super::state::{DensityMatrix, Povm};
use crate::error::{Error, Result};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// `rows × cols` matrix of independent standard complex normals.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Haar-random unitary via QR with the phases of `R`'s diagonal removed.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let qr = ginibre(d, d, rng).qr();
    let (mut q, r) = qr.unpack();
    for k in 0..d {
        let z = r[(k, k)];
        let phase = if z.norm() > 0.0 {
            z / z.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..d {
            q[(i, k)] *= phase;
        }
    }
    q
}

/// Uniform on the unit sphere of `C^d`.
pub fn random_pure_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<DensityMatrix> {
    let v = CVector::from_fn(d, |_, _| gaussian(rng));
    DensityMatrix::pure(&v)
}

/// `G G† / tr(G G†)` with `G` a `d × rank` Ginibre matrix.
pub fn random_mixed_state<R: Rng + ?Sized>(
    d: usize,
    rank: usize,
    rng: &mut R,
) -> Result<DensityMatrix> {
    if d == 0 || rank == 0 {
        return Err(Error::domain("dimension and rank must be positive"));
    }
    let g = ginibre(d, rank, rng);
    let m = &g * g.adjoint();
    let tr: f64 = m.diagonal().iter().map(|z| z.re).sum();
    DensityMatrix::new(hermitian_part(&m.unscale(tr)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectrumFamily {
    /// Independent uniform energies in `[0, d)`; gaps are generically distinct.
    Uniform,
    /// `E_n = n`, giving `D_G = d − 1`.
    EquallySpaced,
}

/// Spectrum from `family` with a Haar-random eigenbasis.
pub fn random_hamiltonian<R: Rng + ?Sized>(
    d: usize,
    family: SpectrumFamily,
    rng: &mut R,
) -> Result<HamiltonianSpectrum> {
    if d == 0 {
        return Err(Error::domain("dimension must be positive"));
    }
    let energies: Vec<f64> = match family {
        SpectrumFamily::Uniform => (0..d).map(|_| rng.random::<f64>() * d as f64).collect(),
        SpectrumFamily::EquallySpaced => (0..d).map(|n| n as f64).collect(),
    };
    HamiltonianSpectrum::from_eigen(energies, random_unitary(d, rng), None)
}

/// `S^{-1/2}` for a positive definite Hermitian `s`.
fn inverse_sqrt(s: &CMatrix) -> Result<CMatrix> {
    let (values, vectors) = hermitian_eigen(s)?;
    if values[0] <= 0.0 {
        return Err(Error::Numeric("matrix is not positive definite".into()));
    }
    let d = s.nrows();
    let diag = CMatrix::from_fn(d, d, |i, j| {
        if i == j {
            Complex64::new(values[i].powf(-0.5), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    Ok(&vectors * diag * vectors.adjoint())
}

/// `M_j = S^{-1/2} A_j S^{-1/2}` with `A_j` Wishart and `S = Σ A_j`.
pub fn random_povm<R: Rng + ?Sized>(d: usize, outcomes: usize, rng: &mut R) -> Result<Povm> {
    if d == 0 || outcomes == 0 {
        return Err(Error::domain(
            "dimension and outcome count must be positive",
        ));
    }
    let parts: Vec<CMatrix> = (0..outcomes)
        .map(|_| {
            let g = ginibre(d, d, rng);
            &g * g.adjoint()
        })
        .collect();
    let s = parts.iter().fold(CMatrix::zeros(d, d), |acc, a| acc + a);
    let w = inverse_sqrt(&hermitian_part(&s))?;
    Povm::new(
        parts
            .iter()
            .map(|a| hermitian_part(&(&w * a * &w)))
            .collect(),
    )
}

/// Projective measurement onto `outcomes ≤ d` random orthogonal subspaces
/// of random nonzero ranks.
pub fn random_projective<R: Rng + ?Sized>(d: usize, outcomes: usize, rng: &mut R) -> Result<Povm> {
    if outcomes == 0 || outcomes > d {
        return Err(Error::domain(format!(
            "projective measurement needs 1 ≤ N ≤ d, got N = {outcomes}, d = {d}"
        )));
    }
    let u = random_unitary(d, rng);
    // every outcome gets one column, the rest are assigned at random
    let mut owner: Vec<usize> = (0..outcomes).collect();
    owner.extend((outcomes..d).map(|_| rng.random_range(0..outcomes)));
    let mut groups = vec![Vec::new(); outcomes];
    for (col, &j) in owner.iter().enumerate() {
        groups[j].push(col);
    }
    Povm::from_basis_groups(&u, &groups)
}

/// POVM whose first element is `(1 − s)·1 + s·A_0`, the rest `s·A_j`, for a
/// random POVM `{A_j}`. Every state gives outcome 0 with probability at
/// least `1 − s`.
pub fn near_identity_povm<R: Rng + ?Sized>(
    d: usize,
    outcomes: usize,
    strength: f64,
    rng: &mut R,
) -> Result<Povm> {
    if !(0.0..=1.0).contains(&strength) {
        return Err(Error::domain(format!("strength {strength} outside [0, 1]")));
    }
    let base = random_povm(d, outcomes, rng)?;
    let id = CMatrix::identity(d, d);
    let elements = base
        .elements()
        .iter()
        .enumerate()
        .map(|(j, a)| {
            let m = a.scale(strength);
            if j == 0 {
                m + id.scale(1.0 - strength)
            } else {
                m
            }
        })
        .collect();
    Povm::new(elements)
}
