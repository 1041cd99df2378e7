use ndarray::Array2;

use super::cat::{cat_basis, isometry};
use super::MechanicalParams;
use crate::dynamics::{Hamiltonian, Modulation};
use crate::qcore::{dagger, pauli_x, pauli_y, pauli_z, FockSpace, StateVector};
use crate::{Result, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum QubitKind {
    Mq,
    Mcq,
}

/// Projected dissipator for the cat qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JumpModel {
    /// Single `σˣ` channel at `κN(2n_th + 1)`.
    LargeN,
    /// `σˣ ± i e^{−2N} σʸ` at `κN(n_th + 1)` and `κN n_th`.
    ExactProjection,
}

impl JumpModel {
    pub fn default_for(n_phonon: f64) -> Self {
        if n_phonon >= 10.0 {
            JumpModel::LargeN
        } else {
            JumpModel::ExactProjection
        }
    }

    /// Weight `e^{−2N}` of the `σʸ` admixture in the exact projection.
    pub fn sigma_y_coefficient(n_phonon: f64) -> f64 {
        (-2.0 * n_phonon).exp()
    }
}

/// Two-level description of either gravimeter.
#[derive(Clone, Debug)]
pub struct QubitFrame {
    pub kind: QubitKind,
    /// `(|0⟩, |1⟩)` for the MQ, `(|C₊⟩, |C₋⟩)` for the MCQ.
    pub basis: [StateVector; 2],
    pub labels: [&'static str; 2],
    /// `dim×2` isometry with the basis vectors as columns.
    pub projector: Array2<C64>,
    pub omega: f64,
    /// `Ω₁` or `Ω₂`.
    pub rabi: f64,
    /// Identity part dropped from the projected Hamiltonian, rad/s.
    pub energy_shift: f64,
    pub jump_ops: Vec<(Array2<C64>, f64)>,
    /// `Ω₁/(Δ₁/ħ)` or `Ω₂/ω_gap`.
    pub validity_ratio: f64,
    /// False once the ratio exceeds 0.1.
    pub valid: bool,
}

impl QubitFrame {
    /// Traceless effective Hamiltonian at time `t`, rad/s.
    pub fn h_eff(&self, t: f64) -> Array2<C64> {
        match self.kind {
            QubitKind::Mq => pauli_z().mapv(|z| z * (0.5 * self.omega)) + pauli_x().mapv(|z| z * self.rabi),
            QubitKind::Mcq => pauli_x().mapv(|z| z * (self.rabi * (self.omega * t).cos())),
        }
    }

    /// `h_eff` as a generator for the integrators.
    pub fn hamiltonian(&self) -> Hamiltonian {
        match self.kind {
            QubitKind::Mq => Hamiltonian::constant(self.h_eff(0.0)),
            QubitKind::Mcq => Hamiltonian::zero(2)
                .with_term(pauli_x().mapv(|z| z * self.rabi), Modulation::Cos(self.omega))
                .expect("2x2 term"),
        }
    }

    /// `P† op P`
    pub fn project(&self, op: &Array2<C64>) -> Array2<C64> {
        dagger(&self.projector).dot(op).dot(&self.projector)
    }
}

/// Two lowest Fock states of the Duffing oscillator.
pub fn mq_frame(params: &MechanicalParams, space: &FockSpace) -> Result<QubitFrame> {
    params.validate()?;
    let ground = StateVector::basis(space.dim(), 0)?;
    let excited = StateVector::basis(space.dim(), 1)?;
    let projector = isometry([&ground, &excited]);
    let kappa = params.kappa();
    let n_th = params.thermal_occupation();
    let o = C64::new(0.0, 0.0);
    let l = C64::new(1.0, 0.0);
    let sigma_minus = ndarray::array![[o, l], [o, o]];
    let sigma_plus = dagger(&sigma_minus);
    let rabi = params.rabi_mq();
    let ratio = if params.duffing > 0.0 { rabi.abs() / (2.0 * params.duffing) } else { f64::INFINITY };
    Ok(QubitFrame {
        kind: QubitKind::Mq,
        basis: [ground, excited],
        labels: ["0", "1"],
        projector,
        omega: params.omega,
        rabi,
        energy_shift: 0.5 * params.omega,
        jump_ops: vec![(sigma_minus, kappa * (n_th + 1.0)), (sigma_plus, kappa * n_th)],
        validity_ratio: ratio,
        valid: ratio <= 0.1,
    })
}

/// Even/odd cat pair of the pumped Duffing oscillator.
pub fn mcq_frame(params: &MechanicalParams, space: &FockSpace, jumps: JumpModel) -> Result<QubitFrame> {
    let cats = cat_basis(params, space)?;
    let projector = isometry([&cats.even, &cats.odd]);
    let n = cats.alpha * cats.alpha;
    let kappa = params.kappa();
    let n_th = params.thermal_occupation();
    let jump_ops = match jumps {
        JumpModel::LargeN => vec![(pauli_x(), kappa * n * (2.0 * n_th + 1.0))],
        JumpModel::ExactProjection => {
            let eps = JumpModel::sigma_y_coefficient(n);
            let iy = pauli_y().mapv(|z| z * C64::new(0.0, eps));
            vec![(pauli_x() + &iy, kappa * n * (n_th + 1.0)), (pauli_x() - &iy, kappa * n * n_th)]
        }
    };
    let rabi = params.rabi_mcq();
    let gap = 4.0 * params.duffing * n;
    let ratio = rabi.abs() / gap;
    Ok(QubitFrame {
        kind: QubitKind::Mcq,
        basis: [cats.even, cats.odd],
        labels: ["C+", "C-"],
        projector,
        omega: params.omega,
        rabi,
        energy_shift: params.duffing * n * n,
        jump_ops,
        validity_ratio: ratio,
        valid: ratio <= 0.1,
    })
}
