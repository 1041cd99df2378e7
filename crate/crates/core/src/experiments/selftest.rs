use std::f64::consts::PI;

use ndarray::array;
use serde::Serialize;

use crate::baselines::{calibrate, s_scala, Baseline, BaselineParams};
use crate::config::ExperimentConfig;
use crate::dynamics::{lindblad_integrate, mq_closed_density, Hamiltonian, IntegratorOptions, SpaceKind};
use crate::metrology::{derivative_step, qfi_mq_closed, qfi_sld};
use crate::model::{spectrum_check, MechanicalParams};
use crate::qcore::{pauli_x, DensityMatrix, FockSpace, StateVector};
use crate::{Result, C64};

use super::run_table1;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, run: impl FnOnce() -> Result<(bool, String)>) -> Check {
    match run() {
        Ok((passed, detail)) => Check { name, passed, detail },
        Err(e) => Check { name, passed: false, detail: e.to_string() },
    }
}

fn decay() -> Result<(bool, String)> {
    let gamma = 3.0;
    let lower = array![[C64::new(0.0, 0.0), C64::new(1.0, 0.0)], [C64::new(0.0, 0.0), C64::new(0.0, 0.0)]];
    let times: Vec<f64> = (0..=20).map(|k| 0.1 * k as f64).collect();
    let traj = lindblad_integrate(
        &Hamiltonian::zero(2),
        &[(lower, gamma)],
        &DensityMatrix::basis(2, 1)?,
        &times,
        &IntegratorOptions::new(1e-11)?,
        SpaceKind::Qubit,
    )?;
    let excited = StateVector::basis(2, 1)?;
    let err =
        times.iter().zip(traj.populations(&excited)).map(|(t, p)| (p - (-gamma * t).exp()).abs()).fold(0.0, f64::max);
    Ok((err < 1e-8, format!("max |p - exp(-gamma t)| = {err:.2e}")))
}

fn rabi() -> Result<(bool, String)> {
    let rabi = 2.0;
    let h = Hamiltonian::constant(pauli_x().mapv(|z| z * rabi));
    let times: Vec<f64> = (0..=20).map(|k| 0.1 * k as f64).collect();
    let traj = lindblad_integrate(
        &h,
        &[],
        &DensityMatrix::basis(2, 0)?,
        &times,
        &IntegratorOptions::new(1e-11)?,
        SpaceKind::Qubit,
    )?;
    let excited = StateVector::basis(2, 1)?;
    let err = times
        .iter()
        .zip(traj.populations(&excited))
        .map(|(t, p)| (p - (rabi * t).sin().powi(2)).abs())
        .fold(0.0, f64::max);
    Ok((err < 1e-8, format!("max |p - sin^2(Omega t)| = {err:.2e}")))
}

fn qfi() -> Result<(bool, String)> {
    let base = MechanicalParams::default();
    let p = base.with_mq_rabi(0.02 * base.omega);
    let t = 0.6 * PI / p.omega;
    let closed = qfi_mq_closed(&p, t)?.value;
    let sld = qfi_sld(|g| mq_closed_density(&p.with_gravity(g), t), p.gravity, derivative_step(&p), t)?.value;
    let rel = (sld / closed - 1.0).abs();
    Ok((rel < 1e-2, format!("closed {closed:.4e} vs SLD {sld:.4e} s^4/m^2")))
}

fn cats() -> Result<(bool, String)> {
    let p = MechanicalParams::default().with_alpha(2.0);
    let r = spectrum_check(&p, &FockSpace::for_amplitude(2.0, 2)?)?;
    let ok = r.overlaps.iter().all(|&o| o > 0.999) && r.splitting < 1e-6 * p.omega;
    Ok((ok, format!("overlaps {:.6}/{:.6}, splitting {:.2e} rad/s", r.overlaps[0], r.overlaps[1], r.splitting)))
}

fn calibration() -> Result<(bool, String)> {
    let omega = 2.0 * PI * 1e4;
    let bp = BaselineParams::reference(omega)?;
    let target = 2.0e-6;
    let g = calibrate(target, omega, Baseline::Scala, &bp)?;
    let back = s_scala(omega, &BaselineParams { gamma_e_bprime: g, ..bp })?;
    let rel = (back / target - 1.0).abs();
    Ok((rel < 1e-12, format!("round-trip error {rel:.1e}")))
}

fn table() -> Result<(bool, String)> {
    let t = run_table1(&ExperimentConfig::default())?;
    let expected = [
        ("S_S", 501.80, 0.005),
        ("S_W", 17.0, 0.02),
        ("S_1", 1.28, 0.01),
        ("S_1^diss", 1.52, 0.05),
        ("S_2", 0.15, 0.02),
        ("S_2^diss", 0.16, 0.05),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, value, tol) in expected {
        let got = t.row(name).map_or(f64::NAN, |r| r.sensitivity);
        ok &= (got - value).abs() <= tol * value;
        parts.push(format!("{name}={got:.3}"));
    }
    Ok((ok, parts.join(" ")))
}

/// Fast oracle checks of the integrator, the metrology and the reference
/// table. Each entry reports its own pass/fail.
pub fn selftest() -> Vec<Check> {
    vec![
        check("lindblad decay vs exp(-gamma t)", decay),
        check("unitary Rabi flop vs sin^2", rabi),
        check("MQ QFI closed form vs SLD", qfi),
        check("cat pair spans the top of the spectrum", cats),
        check("baseline calibration round trip", calibration),
        check("sensitivity table", table),
    ]
}

#[cfg(test)]
mod tests {
    #[test]
    fn all_checks_pass() {
        for c in super::selftest() {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }
}
