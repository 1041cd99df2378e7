//! Truncated Fock-space linear algebra.
//!
//! Everything is dense: the largest spaces used anywhere are a few hundred
//! levels, where dense complex matrices are both simplest and fast enough.

mod fock;
mod linalg;
mod state;
mod wigner;

pub use fock::{check_truncation, required_dim, FockSpace};
pub use linalg::{commutator, dagger, eigh, hermiticity_defect, identity, max_abs, pauli_x, pauli_y, pauli_z, Eigh};
pub use state::{coherent_state, DensityMatrix, InvariantReport, StateVector};
pub use wigner::{wigner, PhaseGrid, WignerMap};

/// Tolerances every [`DensityMatrix`] in the crate is held to.
pub mod tolerance {
    pub const HERMITICITY: f64 = 1e-10;
    pub const TRACE: f64 = 1e-9;
    pub const POSITIVITY: f64 = -1e-9;
    pub const NORM: f64 = 1e-12;
}
