use std::f64::consts::PI;

use ndarray::Array2;

use super::integrator::{lindblad_integrate, validate_times, IntegratorOptions};
use super::{DensityTrajectory, SpaceKind};
use crate::model::{mcq_frame, mq_frame, JumpModel, MechanicalParams};
use crate::qcore::{DensityMatrix, FockSpace, StateVector};
use crate::{Error, Result, C64};

/// Qubit amplitudes and the flip probability at one time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClosedEvolution {
    pub amplitudes: [C64; 2],
    /// Population of the flipped basis state (`|1⟩` or `|C₊⟩`).
    pub mean: f64,
}

fn check_time(t: f64) -> Result<()> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::invalid("t", format!("{t} must be a non-negative time")));
    }
    Ok(())
}

/// MQ from `|0⟩` under `(ω/2)σz + Ω₁σx`:
/// `ψ₁ = (cos(𝒜t/2) + i(ω/𝒜)sin(𝒜t/2), −i(2Ω₁/𝒜)sin(𝒜t/2))`.
pub fn evolve_closed_mq(params: &MechanicalParams, t: f64) -> Result<ClosedEvolution> {
    check_time(t)?;
    let omega = params.omega;
    let omega1 = params.rabi_mq();
    let a = (omega * omega + 4.0 * omega1 * omega1).sqrt();
    let (s, c) = (0.5 * a * t).sin_cos();
    let c1 = C64::new(0.0, -2.0 * omega1 / a * s);
    Ok(ClosedEvolution { amplitudes: [C64::new(c, omega / a * s), c1], mean: c1.norm_sqr() })
}

/// MCQ from `|C₋⟩` under `Ω₂cos(ωt)σˣ`: with `φ = (Ω₂/ω)sin(ωt)`,
/// `ψ₂ = (−i sin φ, cos φ)` in the `(|C₊⟩, |C₋⟩)` basis.
pub fn evolve_closed_mcq(params: &MechanicalParams, t: f64) -> Result<ClosedEvolution> {
    check_time(t)?;
    let phi = params.rabi_mcq() / params.omega * (params.omega * t).sin();
    let (s, c) = phi.sin_cos();
    Ok(ClosedEvolution { amplitudes: [C64::new(0.0, -s), C64::new(c, 0.0)], mean: s * s })
}

fn pure_qubit(amps: [C64; 2]) -> DensityMatrix {
    let v = StateVector::new(ndarray::Array1::from(amps.to_vec())).expect("unit amplitudes");
    v.to_density()
}

/// `|ψ₁(t)⟩⟨ψ₁(t)|`
pub fn mq_closed_density(params: &MechanicalParams, t: f64) -> Result<DensityMatrix> {
    Ok(pure_qubit(evolve_closed_mq(params, t)?.amplitudes))
}

/// `|ψ₂(t)⟩⟨ψ₂(t)|`
pub fn mcq_closed_density(params: &MechanicalParams, t: f64) -> Result<DensityMatrix> {
    Ok(pure_qubit(evolve_closed_mcq(params, t)?.amplitudes))
}

/// One fiftieth of the shortest period among `2π/ω`, `2π/𝒜` and `π/Ω₂`.
pub fn qubit_max_step(params: &MechanicalParams) -> f64 {
    let omega1 = params.rabi_mq();
    let a = (params.omega.powi(2) + 4.0 * omega1 * omega1).sqrt();
    let mut period = (2.0 * PI / params.omega).min(2.0 * PI / a);
    let omega2 = params.rabi_mcq().abs();
    if omega2 > 0.0 {
        period = period.min(PI / omega2);
    }
    period / 50.0
}

/// MQ Rabi measurement under thermal noise, integrated in the qubit frame
/// from `|0⟩`.
pub fn evolve_mq_thermal(
    params: &MechanicalParams,
    times: &[f64],
    opts: &IntegratorOptions,
) -> Result<DensityTrajectory> {
    let frame = mq_frame(params, &FockSpace::new(2)?)?;
    let rho0 = DensityMatrix::basis(2, 0)?;
    let opts = opts.with_max_step(qubit_max_step(params));
    lindblad_integrate(&frame.hamiltonian(), &frame.jump_ops, &rho0, times, &opts, SpaceKind::Qubit)
}

/// `Γ = 2κN(2n_th + 1)`, the decay rate of the cat-qubit coherence.
pub fn mcq_decoherence_rate(params: &MechanicalParams) -> f64 {
    let n = params.alpha().powi(2);
    2.0 * params.kappa() * n * (2.0 * params.thermal_occupation() + 1.0)
}

/// `Ō₂ = ½ − ½cos(2φ)e^{−Γt}` with `φ = (Ω₂/ω)sin(ωt)`.
pub fn mcq_dissipative_mean(params: &MechanicalParams, t: f64) -> f64 {
    let phi = params.rabi_mcq() / params.omega * (params.omega * t).sin();
    0.5 - 0.5 * (2.0 * phi).cos() * (-mcq_decoherence_rate(params) * t).exp()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum McqMode {
    Analytic,
    Numeric(JumpModel),
}

#[derive(Clone, Debug)]
pub struct McqThermal {
    pub times: Vec<f64>,
    /// `|C₊⟩` population.
    pub mean_o2: Vec<f64>,
    /// Present in numeric mode.
    pub trajectory: Option<DensityTrajectory>,
    pub decoherence_rate: f64,
}

/// MCQ Rabi measurement under thermal noise from `|C₋⟩`.
pub fn evolve_mcq_thermal(
    params: &MechanicalParams,
    times: &[f64],
    mode: McqMode,
    opts: &IntegratorOptions,
) -> Result<McqThermal> {
    params.validate()?;
    validate_times(times)?;
    if times[0] < 0.0 {
        return Err(Error::invalid("times", "must start at t >= 0"));
    }
    let rate = mcq_decoherence_rate(params);
    match mode {
        McqMode::Analytic => Ok(McqThermal {
            times: times.to_vec(),
            mean_o2: times.iter().map(|&t| mcq_dissipative_mean(params, t)).collect(),
            trajectory: None,
            decoherence_rate: rate,
        }),
        McqMode::Numeric(jumps) => {
            let space = FockSpace::for_amplitude(params.alpha(), 2)?;
            let frame = mcq_frame(params, &space, jumps)?;
            // Start in |C₋⟩ at t = 0 and integrate to the first requested
            // time if it is later.
            let mut grid = times.to_vec();
            let prepend = grid[0] > 0.0;
            if prepend {
                grid.insert(0, 0.0);
            }
            let opts = opts.with_max_step(qubit_max_step(params));
            let mut traj = lindblad_integrate(
                &frame.hamiltonian(),
                &frame.jump_ops,
                &DensityMatrix::basis(2, 1)?,
                &grid,
                &opts,
                SpaceKind::Qubit,
            )?;
            if prepend {
                traj.times.remove(0);
                traj.states.remove(0);
            }
            let even: Array2<C64> = Array2::from_diag(&ndarray::arr1(&[C64::new(1.0, 0.0), C64::new(0.0, 0.0)]));
            let mean_o2 = traj.expectations(&even).iter().map(|z| z.re).collect();
            Ok(McqThermal { times: times.to_vec(), mean_o2, trajectory: Some(traj), decoherence_rate: rate })
        }
    }
}
