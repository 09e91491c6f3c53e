//! Hamiltonian spectral data: eigenspaces and the table of energy gaps.

use std::io::Write;
use std::ops::Range;

use num_complex::Complex64;

use super::linalg::{hermitian_eigen, hermiticity_defect, unitarity_defect, CMatrix};
use crate::error::{ensure_dim, Error, Result};

/// Relative tolerance (times the spectral range) used by default both for
/// grouping eigenvalues into eigenspaces and for declaring gaps equal.
pub const DEFAULT_RELATIVE_TOLERANCE: f64 = 1e-9;
/// Absolute floor on the default tolerances, used for flat spectra.
const TOLERANCE_FLOOR: f64 = 1e-12;
const UNITARITY_TOLERANCE: f64 = 1e-9;

/// Eigen-decomposed Hamiltonian (`ħ = 1`).
///
/// Eigenvalues are ascending. Consecutive eigenvalues closer than the
/// degeneracy tolerance share an eigenspace; each eigenspace is a
/// contiguous range of levels and is assigned the mean of its eigenvalues
/// as its energy, which is the energy used for time evolution.
#[derive(Debug, Clone)]
pub struct HamiltonianSpectrum {
    eigenvalues: Vec<f64>,
    eigenvectors: CMatrix,
    eigenspaces: Vec<Range<usize>>,
    eigenspace_energies: Vec<f64>,
    level_space: Vec<usize>,
    degeneracy_tol: f64,
}

impl HamiltonianSpectrum {
    /// Hamiltonian diagonal in the computational basis.
    pub fn diagonal(energies: &[f64]) -> Result<Self> {
        let d = energies.len();
        Self::from_eigen(energies.to_vec(), CMatrix::identity(d, d), None)
    }

    /// Diagonalizes a Hermitian matrix.
    pub fn from_hermitian(h: &CMatrix, degeneracy_tol: Option<f64>) -> Result<Self> {
        if !h.is_square() {
            return Err(Error::InvalidOperator("Hamiltonian is not square".into()));
        }
        let defect = hermiticity_defect(h);
        if defect > 1e-10 * (1.0 + super::linalg::max_abs(h)) {
            return Err(Error::InvalidOperator(format!(
                "Hamiltonian is not Hermitian (defect {defect:e})"
            )));
        }
        let (values, vectors) = hermitian_eigen(h)?;
        Self::from_eigen(values, vectors, degeneracy_tol)
    }

    /// Pre-diagonalized data: `eigenvectors` holds one eigenvector per
    /// column, in the order of `eigenvalues` (which need not be sorted).
    pub fn from_eigen(
        eigenvalues: Vec<f64>,
        eigenvectors: CMatrix,
        degeneracy_tol: Option<f64>,
    ) -> Result<Self> {
        let d = eigenvalues.len();
        if d == 0 {
            return Err(Error::InvalidOperator("empty spectrum".into()));
        }
        if eigenvalues.iter().any(|e| !e.is_finite()) {
            return Err(Error::InvalidOperator("non-finite eigenvalue".into()));
        }
        ensure_dim(d, eigenvectors.nrows())?;
        ensure_dim(d, eigenvectors.ncols())?;
        let defect = unitarity_defect(&eigenvectors);
        if defect > UNITARITY_TOLERANCE {
            return Err(Error::InvalidOperator(format!(
                "eigenvector matrix is not unitary (defect {defect:e})"
            )));
        }
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| eigenvalues[a].total_cmp(&eigenvalues[b]));
        let sorted: Vec<f64> = order.iter().map(|&i| eigenvalues[i]).collect();
        let vectors = CMatrix::from_fn(d, d, |r, c| eigenvectors[(r, order[c])]);
        let tol = match degeneracy_tol {
            Some(t) if t > 0.0 && t.is_finite() => t,
            Some(t) => {
                return Err(Error::domain(format!(
                    "degeneracy tolerance {t} must be positive"
                )))
            }
            None => default_tolerance(&sorted),
        };
        let mut eigenspaces = Vec::new();
        let mut start = 0;
        for i in 1..=d {
            if i == d || sorted[i] - sorted[i - 1] >= tol {
                if sorted[i - 1] - sorted[start] >= tol {
                    return Err(Error::Numeric(format!(
                        "eigenvalues {}..{} chain into one eigenspace wider than the \
                         degeneracy tolerance {tol:e}",
                        start,
                        i - 1
                    )));
                }
                eigenspaces.push(start..i);
                start = i;
            }
        }
        let eigenspace_energies = eigenspaces
            .iter()
            .map(|r| sorted[r.clone()].iter().sum::<f64>() / r.len() as f64)
            .collect();
        let mut level_space = vec![0; d];
        for (a, r) in eigenspaces.iter().enumerate() {
            for n in r.clone() {
                level_space[n] = a;
            }
        }
        Ok(HamiltonianSpectrum {
            eigenvalues: sorted,
            eigenvectors: vectors,
            eigenspaces,
            eigenspace_energies,
            level_space,
            degeneracy_tol: tol,
        })
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &CMatrix {
        &self.eigenvectors
    }

    pub fn eigenspaces(&self) -> &[Range<usize>] {
        &self.eigenspaces
    }

    pub fn eigenspace_energies(&self) -> &[f64] {
        &self.eigenspace_energies
    }

    pub fn eigenspace_count(&self) -> usize {
        self.eigenspaces.len()
    }

    /// Eigenspace containing level `n`.
    pub fn eigenspace_of(&self, n: usize) -> usize {
        self.level_space[n]
    }

    /// Energy used to evolve level `n`: its eigenspace energy.
    pub fn level_energy(&self, n: usize) -> f64 {
        self.eigenspace_energies[self.level_space[n]]
    }

    pub fn degeneracy_tol(&self) -> f64 {
        self.degeneracy_tol
    }

    pub fn spectral_range(&self) -> f64 {
        self.eigenvalues[self.dim() - 1] - self.eigenvalues[0]
    }

    /// Smallest energy difference between distinct eigenspaces, if any.
    pub fn min_gap(&self) -> Option<f64> {
        self.eigenspace_energies
            .windows(2)
            .map(|w| w[1] - w[0])
            .min_by(f64::total_cmp)
    }

    /// `10³` periods of the slowest oscillation, `2π·10³ / min_gap`; falls
    /// back to `2π·10³` for a single eigenspace.
    pub fn default_horizon(&self) -> f64 {
        let period = 2.0 * std::f64::consts::PI / self.min_gap().unwrap_or(1.0);
        1e3 * period
    }

    /// `V† m V`.
    pub fn to_energy_basis(&self, m: &CMatrix) -> Result<CMatrix> {
        ensure_dim(self.dim(), m.nrows())?;
        ensure_dim(self.dim(), m.ncols())?;
        Ok(self.eigenvectors.adjoint() * m * &self.eigenvectors)
    }

    /// `V m V†`.
    pub fn from_energy_basis(&self, m: &CMatrix) -> CMatrix {
        &self.eigenvectors * m * self.eigenvectors.adjoint()
    }

    /// Projector onto eigenspace `a`, in the computational basis.
    pub fn projector(&self, a: usize) -> CMatrix {
        let r = self.eigenspaces[a].clone();
        let cols = self.eigenvectors.columns(r.start, r.len());
        &cols * cols.adjoint()
    }

    /// The Hamiltonian matrix `Σ_a E_a Π_a`.
    pub fn matrix(&self) -> CMatrix {
        let d = self.dim();
        let diag = CMatrix::from_fn(d, d, |r, c| {
            if r == c {
                Complex64::from(self.level_energy(r))
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        self.from_energy_basis(&diag)
    }
}

fn default_tolerance(sorted: &[f64]) -> f64 {
    let range = sorted[sorted.len() - 1] - sorted[0];
    (DEFAULT_RELATIVE_TOLERANCE * range).max(TOLERANCE_FLOOR)
}

/// Default gap-equality tolerance for `h`: `10⁻⁹ ×` spectral range.
pub fn default_gap_tolerance(h: &HamiltonianSpectrum) -> f64 {
    default_tolerance(&h.eigenvalues)
}

/// `G = E_from − E_to` between two distinct eigenspaces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gap {
    pub value: f64,
    pub from: usize,
    pub to: usize,
}

/// All gaps between ordered pairs of distinct eigenspaces, grouped into
/// classes of equal value.
///
/// Gaps are sorted by value and consecutive gaps closer than the tolerance
/// join the same class.
#[derive(Debug, Clone)]
pub struct GapTable {
    gaps: Vec<Gap>,
    classes: Vec<Vec<usize>>,
    pair_class: Vec<Option<usize>>,
    eigenspaces: usize,
    tolerance: f64,
}

impl GapTable {
    pub fn build(h: &HamiltonianSpectrum, gap_tol: f64) -> Result<Self> {
        if !(gap_tol > 0.0 && gap_tol.is_finite()) {
            return Err(Error::domain(format!(
                "gap tolerance {gap_tol} must be positive"
            )));
        }
        let k = h.eigenspace_count();
        let e = h.eigenspace_energies();
        let mut gaps = Vec::with_capacity(k * k.saturating_sub(1));
        for from in 0..k {
            for to in 0..k {
                if from != to {
                    gaps.push(Gap {
                        value: e[from] - e[to],
                        from,
                        to,
                    });
                }
            }
        }
        let mut order: Vec<usize> = (0..gaps.len()).collect();
        order.sort_by(|&a, &b| gaps[a].value.total_cmp(&gaps[b].value));
        let mut classes: Vec<Vec<usize>> = Vec::new();
        let mut prev: Option<f64> = None;
        for &g in &order {
            let v = gaps[g].value;
            match (prev, classes.last_mut()) {
                (Some(p), Some(class)) if v - p < gap_tol => class.push(g),
                _ => classes.push(vec![g]),
            }
            prev = Some(v);
        }
        let mut pair_class = vec![None; k * k];
        for (c, members) in classes.iter().enumerate() {
            for &g in members {
                pair_class[gaps[g].from * k + gaps[g].to] = Some(c);
            }
        }
        Ok(GapTable {
            gaps,
            classes,
            pair_class,
            eigenspaces: k,
            tolerance: gap_tol,
        })
    }

    pub fn gaps(&self) -> &[Gap] {
        &self.gaps
    }

    /// Indices into [`gaps`](Self::gaps), one list per class, in increasing
    /// gap value.
    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// Class of the gap between eigenspaces `from` and `to`; `None` when
    /// they coincide.
    pub fn class_of(&self, from: usize, to: usize) -> Option<usize> {
        self.pair_class[from * self.eigenspaces + to]
    }

    /// `D_G`: the largest class size, or 1 when there are no gaps.
    pub fn max_degeneracy(&self) -> usize {
        self.classes.iter().map(Vec::len).max().unwrap_or(1)
    }

    /// Writes one row per gap: `from,to,gap,class,class_size`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["from", "to", "gap", "class", "class_size"])?;
        for (c, members) in self.classes.iter().enumerate() {
            for &g in members {
                let gap = self.gaps[g];
                w.write_record([
                    gap.from.to_string(),
                    gap.to.to_string(),
                    gap.value.to_string(),
                    c.to_string(),
                    members.len().to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Largest number of ordered eigenspace pairs sharing one energy gap.
pub fn max_gap_degeneracy(h: &HamiltonianSpectrum, gap_tol: f64) -> Result<usize> {
    Ok(GapTable::build(h, gap_tol)?.max_degeneracy())
}

/// `D_G` at `0.1×`, `1×` and `10×` the given tolerance, to expose how much
/// the degeneracy count depends on it.
pub fn gap_degeneracy_sensitivity(
    h: &HamiltonianSpectrum,
    gap_tol: f64,
) -> Result<[(f64, usize); 3]> {
    let mut out = [(0.0, 0); 3];
    for (slot, scale) in out.iter_mut().zip([0.1, 1.0, 10.0]) {
        let tol = gap_tol * scale;
        *slot = (tol, max_gap_degeneracy(h, tol)?);
    }
    Ok(out)
}
