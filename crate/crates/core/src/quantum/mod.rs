//! Finite-dimensional closed quantum systems.

pub mod dynamics;
pub mod linalg;
pub mod moments;
pub mod purify;
pub mod random;
pub mod spectrum;
pub mod state;

pub use dynamics::{
    dephase, effective_dimension, eigenspace_weights, equilibrium_distribution, evolve_density,
    max_outcomes_for_equilibration, quantum_bound, quantum_bound_unshifted, quantum_probe,
    QuantumProbe,
};
pub use linalg::{CMatrix, CVector};
pub use moments::second_moment_exact;
pub use purify::{extend_hamiltonian, partial_trace_ancilla, purify, Purification};
pub use random::{
    near_identity_povm, random_hamiltonian, random_mixed_state, random_povm, random_projective,
    random_pure_state, random_unitary, SpectrumFamily,
};
pub use spectrum::{
    default_gap_tolerance, gap_degeneracy_sensitivity, max_gap_degeneracy, Gap, GapTable,
    HamiltonianSpectrum,
};
pub use state::{DensityMatrix, Povm};
