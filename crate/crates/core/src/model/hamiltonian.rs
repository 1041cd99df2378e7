//! Hamiltonians as `H/ħ` in rad/s.

use ndarray::Array2;

use super::MechanicalParams;
use crate::dynamics::{Hamiltonian, Modulation};
use crate::qcore::FockSpace;
use crate::{Result, C64};

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// `ωâ†â − Dâ†â†ââ`, plus `Ω₁(â† + â)` when gravity is included.
pub fn h1(params: &MechanicalParams, space: &FockSpace, include_gravity: bool) -> Array2<C64> {
    let mut h = space.number().mapv(|z| z * params.omega) - space.kerr().mapv(|z| z * params.duffing);
    if include_gravity {
        let omega1 = params.rabi_mq();
        if omega1 != 0.0 {
            h = h + space.position().mapv(|z| z * omega1);
        }
    }
    h
}

/// Rotating-frame cat Hamiltonian `−Dâ†â†ââ + P(â†² + â²)` at time `t`,
/// plus `Ω₁(â†e^{iωt} + âe^{−iωt})` when gravity is included.
pub fn h2(params: &MechanicalParams, space: &FockSpace, include_gravity: bool, t: f64) -> Array2<C64> {
    let mut h = space.two_phonon().mapv(|z| z * params.pump) - space.kerr().mapv(|z| z * params.duffing);
    if include_gravity {
        let omega1 = params.rabi_mq();
        if omega1 != 0.0 {
            let phase = C64::from_polar(omega1, params.omega * t);
            h = h + space.raising().mapv(|z| z * phase) + space.lowering().mapv(|z| z * phase.conj());
        }
    }
    h
}

/// [`h2`] with gravity as a time-dependent generator for the integrators.
pub fn h2_driven(params: &MechanicalParams, space: &FockSpace) -> Result<Hamiltonian> {
    let omega1 = params.rabi_mq();
    Hamiltonian::constant(h2(params, space, false, 0.0))
        .with_term(space.raising().mapv(|z| z * omega1), Modulation::Phase(params.omega))?
        .with_term(space.lowering().mapv(|z| z * omega1), Modulation::Phase(-params.omega))
}

/// Rotating-frame Duffing oscillator under a resonant drive:
/// `−Dâ†â†ââ + ω_d(â† + â)`.
pub fn h1_rotating_with_drive(params: &MechanicalParams, space: &FockSpace, omega_d: f64) -> Array2<C64> {
    space.position().mapv(|z| z * omega_d) - space.kerr().mapv(|z| z * params.duffing)
}

/// Cat Hamiltonian under the same drive: `h2 + ω_d(â† + â)`.
pub fn h2_with_drive(params: &MechanicalParams, space: &FockSpace, omega_d: f64) -> Array2<C64> {
    h2(params, space, false, 0.0) + space.position().mapv(|z| z * real(omega_d))
}
