//! Exact infinite-time second moment of `tr(P(ρ_t − ω))` for pure states.

use num_complex::Complex64;

use super::linalg::{hermitian_eigen, hermiticity_defect, CMatrix, ZERO};
use super::spectrum::{GapTable, HamiltonianSpectrum};
use super::state::DensityMatrix;
use crate::error::{ensure_dim, Error, Result};

pub const PURITY_TOLERANCE: f64 = 1e-9;

/// Energy eigenbasis in which the pure state `rho` has support on at most one
/// vector of each eigenspace.
///
/// Each eigenspace block of `rho` has rank at most one; diagonalizing it
/// and rotating the eigenspace basis onto the block's eigenvectors leaves a
/// single nonzero diagonal entry.
pub fn aligned_energy_basis(rho: &DensityMatrix, h: &HamiltonianSpectrum) -> Result<CMatrix> {
    let r = h.to_energy_basis(rho.matrix())?;
    let d = h.dim();
    let mut rotation = CMatrix::zeros(d, d);
    for range in h.eigenspaces() {
        let (s, m) = (range.start, range.len());
        let block = r.view((s, s), (m, m)).into_owned();
        let u = if m == 1 {
            CMatrix::identity(1, 1)
        } else {
            hermitian_eigen(&block)?.1
        };
        rotation.view_mut((s, s), (m, m)).copy_from(&u);
    }
    Ok(h.eigenvectors() * rotation)
}

/// `⟨|tr(P(ρ_t − ω))|²⟩` for a pure state, as the gap-class sum
/// `Σ_{n≠j} Σ_{k≠l} v_nj v_kl* δ(G_nj, G_kl)` with `v_nj = ρ_nj P_jn` in the
/// aligned energy basis. Gaps are compared with tolerance `gap_tol`.
///
/// `p` may be any Hermitian operator; POVM elements and projectors are the
/// intended use. Mixed states are rejected: purify them first.
pub fn second_moment_exact(
    rho_pure: &DensityMatrix,
    p: &CMatrix,
    h: &HamiltonianSpectrum,
    gap_tol: f64,
) -> Result<f64> {
    ensure_dim(h.dim(), rho_pure.dim())?;
    ensure_dim(h.dim(), p.nrows())?;
    ensure_dim(h.dim(), p.ncols())?;
    if hermiticity_defect(p) > 1e-10 {
        return Err(Error::InvalidOperator(
            "measurement operator is not Hermitian".into(),
        ));
    }
    let purity = rho_pure.purity();
    if (purity - 1.0).abs() > PURITY_TOLERANCE {
        return Err(Error::domain(format!(
            "state has purity {purity}; the exact moment needs a pure state"
        )));
    }
    let basis = aligned_energy_basis(rho_pure, h)?;
    let rho_w = basis.adjoint() * rho_pure.matrix() * &basis;
    let p_w = basis.adjoint() * p * &basis;
    let table = GapTable::build(h, gap_tol)?;
    let mut class_sums = vec![ZERO; table.classes().len()];
    let d = h.dim();
    for n in 0..d {
        for j in 0..d {
            // same-eigenspace pairs carry no weight in the aligned basis
            if let Some(class) = table.class_of(h.eigenspace_of(n), h.eigenspace_of(j)) {
                class_sums[class] += rho_w[(n, j)] * p_w[(j, n)];
            }
        }
    }
    Ok(class_sums.iter().map(Complex64::norm_sqr).sum())
}
