//! Closed-form qubit evolutions, the Lindblad and Schrödinger integrators,
//! and the leakage, phase-flip and effective-model studies.

mod evolve;
mod hamiltonian;
mod integrator;
mod studies;

use ndarray::Array2;
use serde::Serialize;

use crate::qcore::{DensityMatrix, StateVector};
use crate::C64;

pub use evolve::{
    evolve_closed_mcq, evolve_closed_mq, evolve_mcq_thermal, evolve_mq_thermal, mcq_closed_density,
    mcq_decoherence_rate, mcq_dissipative_mean, mq_closed_density, qubit_max_step, ClosedEvolution, McqMode,
    McqThermal,
};
pub use hamiltonian::{Hamiltonian, Modulation};
pub use integrator::{
    lindblad_exact, lindblad_integrate, lindblad_integrate_eigenframe, schrodinger_integrate, IntegratorOptions,
    IntegratorStats, StateTrajectory,
};
pub use studies::{
    effective_vs_full, effective_vs_full_with_dim, leakage_study, leakage_study_with_dim, phase_flip_study,
    phase_flip_study_with_dim, EffectiveComparison, LeakageReport, PhaseFlipSeries,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SpaceKind {
    FullFock,
    Qubit,
}

/// Density matrices on a strictly increasing time grid.
#[derive(Clone, Debug)]
pub struct DensityTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub space: SpaceKind,
    pub stats: IntegratorStats,
}

impl DensityTrajectory {
    /// `⟨ψ|ρ(t)|ψ⟩`
    pub fn populations(&self, psi: &StateVector) -> Vec<f64> {
        self.states.iter().map(|r| r.population(psi)).collect()
    }

    /// `Tr[ρ(t)·op]`
    pub fn expectations(&self, op: &Array2<C64>) -> Vec<C64> {
        self.states.iter().map(|r| r.expectation(op)).collect()
    }

    pub fn last(&self) -> &DensityMatrix {
        self.states.last().expect("trajectories hold at least one state")
    }
}
