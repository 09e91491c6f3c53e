//! Density matrices and POVMs.

use super::linalg::{
    hermitian_eigen, hermiticity_defect, kron, max_abs, outer, trace, trace_product, CMatrix,
    CVector,
};
use crate::distribution::OutcomeDistribution;
use crate::error::{ensure_dim, Error, Result};

pub const HERMITICITY_TOLERANCE: f64 = 1e-10;
pub const TRACE_TOLERANCE: f64 = 1e-9;
pub const POSITIVITY_TOLERANCE: f64 = 1e-10;
pub const COMPLETENESS_TOLERANCE: f64 = 1e-9;

/// Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::InvalidOperator(
                "density matrix must be square".into(),
            ));
        }
        let herm = hermiticity_defect(&matrix);
        if herm > HERMITICITY_TOLERANCE {
            return Err(Error::InvalidOperator(format!(
                "density matrix is not Hermitian (defect {herm:e})"
            )));
        }
        let tr = trace(&matrix);
        if (tr.re - 1.0).abs() > TRACE_TOLERANCE || tr.im.abs() > TRACE_TOLERANCE {
            return Err(Error::InvalidOperator(format!("trace is {tr}, not 1")));
        }
        let (values, _) = hermitian_eigen(&matrix)?;
        if values[0] < -POSITIVITY_TOLERANCE {
            return Err(Error::InvalidOperator(format!(
                "negative eigenvalue {}",
                values[0]
            )));
        }
        Ok(DensityMatrix { matrix })
    }

    /// For matrices that are valid by construction (unitary conjugation of
    /// a valid state, dephasing).
    pub(crate) fn new_unchecked(matrix: CMatrix) -> Self {
        DensityMatrix { matrix }
    }

    /// `|ψ⟩⟨ψ|` for the normalized `ψ`.
    pub fn pure(psi: &CVector) -> Result<Self> {
        let norm = psi.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidOperator("state vector has zero norm".into()));
        }
        Ok(DensityMatrix {
            matrix: outer(&psi.unscale(norm)),
        })
    }

    pub fn maximally_mixed(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidOperator("dimension must be positive".into()));
        }
        Ok(DensityMatrix {
            matrix: CMatrix::identity(d, d).unscale(d as f64),
        })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        trace_product(&self.matrix, &self.matrix).re
    }

    /// Eigenvalues (ascending) and eigenvectors.
    pub fn eigen(&self) -> Result<(Vec<f64>, CMatrix)> {
        hermitian_eigen(&self.matrix)
    }
}

/// Positive operators summing to the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    elements: Vec<CMatrix>,
}

impl Povm {
    pub fn new(elements: Vec<CMatrix>) -> Result<Self> {
        let first = elements
            .first()
            .ok_or_else(|| Error::InvalidOperator("POVM needs at least one element".into()))?;
        let d = first.nrows();
        let mut sum = CMatrix::zeros(d, d);
        for (j, m) in elements.iter().enumerate() {
            ensure_dim(d, m.nrows())?;
            ensure_dim(d, m.ncols())?;
            let herm = hermiticity_defect(m);
            if herm > HERMITICITY_TOLERANCE {
                return Err(Error::InvalidOperator(format!(
                    "element {j} is not Hermitian (defect {herm:e})"
                )));
            }
            let (values, _) = hermitian_eigen(m)?;
            if values[0] < -POSITIVITY_TOLERANCE {
                return Err(Error::InvalidOperator(format!(
                    "element {j} has negative eigenvalue {}",
                    values[0]
                )));
            }
            sum += m;
        }
        let defect = max_abs(&(sum - CMatrix::identity(d, d)));
        if defect > COMPLETENESS_TOLERANCE {
            return Err(Error::InvalidOperator(format!(
                "elements do not sum to the identity (defect {defect:e})"
            )));
        }
        Ok(Povm { elements })
    }

    /// Rank-one projectors `|v⟩⟨v|/⟨v|v⟩`, which must form a complete
    /// orthogonal set.
    pub fn projective(vectors: &[CVector]) -> Result<Self> {
        let elements = vectors
            .iter()
            .map(|v| {
                let n = v.norm();
                if n > 0.0 {
                    Ok(outer(&v.unscale(n)))
                } else {
                    Err(Error::InvalidOperator("zero measurement vector".into()))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(elements)
    }

    /// Projectors onto the spans of groups of columns of the unitary
    /// `basis`; every column must be used exactly once.
    pub fn from_basis_groups(basis: &CMatrix, groups: &[Vec<usize>]) -> Result<Self> {
        let d = basis.nrows();
        let mut used = vec![false; d];
        let mut elements = Vec::with_capacity(groups.len());
        for g in groups {
            let mut p = CMatrix::zeros(d, d);
            for &c in g {
                if c >= d || used[c] {
                    return Err(Error::InvalidOperator(format!(
                        "basis column {c} missing or used twice"
                    )));
                }
                used[c] = true;
                p += outer(&basis.column(c).into_owned());
            }
            elements.push(p);
        }
        Self::new(elements)
    }

    /// The trivial one-outcome measurement.
    pub fn identity(d: usize) -> Result<Self> {
        Self::new(vec![CMatrix::identity(d, d)])
    }

    pub fn elements(&self) -> &[CMatrix] {
        &self.elements
    }

    pub fn outcome_count(&self) -> usize {
        self.elements.len()
    }

    pub fn dim(&self) -> usize {
        self.elements[0].nrows()
    }

    /// `p_j = tr(M_j ρ)`.
    pub fn probabilities(&self, rho: &DensityMatrix) -> Result<OutcomeDistribution> {
        ensure_dim(self.dim(), rho.dim())?;
        OutcomeDistribution::new(
            self.elements
                .iter()
                .map(|m| trace_product(m, rho.matrix()).re)
                .collect(),
        )
    }

    /// `{M_j ⊗ 1}` on a space extended by an ancilla of dimension `d_anc`.
    pub fn tensor_identity(&self, d_anc: usize) -> Povm {
        let id = CMatrix::identity(d_anc, d_anc);
        Povm {
            elements: self.elements.iter().map(|m| kron(m, &id)).collect(),
        }
    }

    /// Whether every element is idempotent within `tol`.
    pub fn is_projective(&self, tol: f64) -> bool {
        self.elements.iter().all(|m| max_abs(&(m * m - m)) < tol)
    }
}

#[cfg(test)]
pub(crate) fn c(re: f64) -> num_complex::Complex64 {
    num_complex::Complex64::new(re, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plus() -> CVector {
        CVector::from_vec(vec![c(1.0), c(1.0)])
    }

    fn minus() -> CVector {
        CVector::from_vec(vec![c(1.0), c(-1.0)])
    }

    #[test]
    fn density_validation() {
        let rho = DensityMatrix::pure(&plus()).unwrap();
        assert!((rho.purity() - 1.0).abs() < 1e-15);
        assert!(DensityMatrix::new(rho.matrix().clone()).is_ok());
        assert!(DensityMatrix::new(rho.matrix().scale(2.0)).is_err());
        let mut bad = CMatrix::identity(2, 2).scale(0.5);
        bad[(0, 1)] = c(0.7);
        bad[(1, 0)] = c(0.7);
        assert!(DensityMatrix::new(bad).is_err());
        let mut non_herm = CMatrix::identity(2, 2).scale(0.5);
        non_herm[(0, 1)] = c(0.1);
        assert!(DensityMatrix::new(non_herm).is_err());
        assert!((DensityMatrix::maximally_mixed(4).unwrap().purity() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn povm_validation() {
        let sx = Povm::projective(&[plus(), minus()]).unwrap();
        assert_eq!(sx.outcome_count(), 2);
        assert!(sx.is_projective(1e-12));
        assert!(Povm::projective(&[plus()]).is_err());
        assert!(Povm::new(vec![]).is_err());
        let neg = CMatrix::from_diagonal(&CVector::from_vec(vec![c(2.0), c(1.0)]));
        let comp = CMatrix::from_diagonal(&CVector::from_vec(vec![c(-1.0), c(0.0)]));
        assert!(Povm::new(vec![neg, comp]).is_err());
        let p = sx
            .probabilities(&DensityMatrix::pure(&plus()).unwrap())
            .unwrap();
        assert!((p.probs()[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn basis_groups() {
        let id = CMatrix::identity(3, 3);
        let m = Povm::from_basis_groups(&id, &[vec![0, 2], vec![1]]).unwrap();
        assert_eq!(m.elements()[0][(2, 2)], c(1.0));
        assert!(Povm::from_basis_groups(&id, &[vec![0, 0], vec![1, 2]]).is_err());
        assert!(Povm::from_basis_groups(&id, &[vec![0], vec![1]]).is_err());
    }

    #[test]
    fn tensor_identity_preserves_probabilities() {
        let sx = Povm::projective(&[plus(), minus()]).unwrap();
        let big = sx.tensor_identity(3);
        assert_eq!(big.dim(), 6);
        assert!(Povm::new(big.elements().to_vec()).is_ok());
    }
}
