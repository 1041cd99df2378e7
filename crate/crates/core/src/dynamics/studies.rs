use std::f64::consts::PI;

use ndarray::Array2;

use super::evolve::{evolve_closed_mcq, qubit_max_step};
use super::hamiltonian::{Hamiltonian, Modulation};
use super::integrator::{lindblad_integrate_eigenframe, schrodinger_integrate, IntegratorOptions, IntegratorStats};
use super::SpaceKind;
use crate::model::{cat_basis, h1_rotating_with_drive, h2, h2_driven, h2_with_drive, MechanicalParams, QubitKind};
use crate::qcore::{DensityMatrix, FockSpace, StateVector};
use crate::{Error, Result};

fn superpose(a: &StateVector, b: &StateVector, sign: f64) -> Result<StateVector> {
    StateVector::new(a.amplitudes() + &b.amplitudes().mapv(|z| z * sign))
}

fn study_space(params: &MechanicalParams, min_dim: usize) -> Result<FockSpace> {
    FockSpace::for_amplitude(params.alpha(), min_dim)
}

/// Populations outside each qubit subspace under a resonant drive.
#[derive(Clone, Debug)]
pub struct LeakageReport {
    pub times: Vec<f64>,
    /// `ℙ₁ = 1 − Σ_{l=0,1} ⟨l|ρ|l⟩`
    pub p_leak_mq: Vec<f64>,
    /// `ℙ₂ = 1 − Σ_± ⟨C±|ρ|C±⟩`
    pub p_leak_mcq: Vec<f64>,
    /// Fock populations, one row per time.
    pub populations_mq: Array2<f64>,
    pub populations_mcq: Array2<f64>,
    pub omega_d: f64,
    pub dim: usize,
}

impl LeakageReport {
    pub fn max_mq(&self) -> f64 {
        self.p_leak_mq.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_mcq(&self) -> f64 {
        self.p_leak_mcq.iter().copied().fold(0.0, f64::max)
    }
}

/// Drives both oscillators with `ω_d(â† + â)` in the frame rotating at `ω`:
/// the MQ starts in `|0⟩`, the MCQ in `|C₋⟩`. Evolution is unitary.
pub fn leakage_study(
    params: &MechanicalParams,
    omega_d: f64,
    times: &[f64],
    opts: &IntegratorOptions,
) -> Result<LeakageReport> {
    leakage_study_with_dim(params, omega_d, times, opts, 2)
}

/// [`leakage_study`] in a Fock space of at least `min_dim` levels.
pub fn leakage_study_with_dim(
    params: &MechanicalParams,
    omega_d: f64,
    times: &[f64],
    opts: &IntegratorOptions,
    min_dim: usize,
) -> Result<LeakageReport> {
    if !omega_d.is_finite() {
        return Err(Error::invalid("omega_d", "must be finite"));
    }
    let space = study_space(params, min_dim)?;
    let cats = cat_basis(params, &space)?;
    let dim = space.dim();
    let mut max_step = 2.0 * PI / params.omega;
    if omega_d != 0.0 {
        max_step = max_step.min(2.0 * PI / omega_d.abs());
    }
    let opts = opts.with_max_step(max_step / 50.0);

    let h_mq = Hamiltonian::constant(h1_rotating_with_drive(params, &space, omega_d));
    let h_mcq = Hamiltonian::constant(h2_with_drive(params, &space, omega_d));
    let mq = schrodinger_integrate(&h_mq, &StateVector::basis(dim, 0)?, times, &opts)?;
    let mcq = schrodinger_integrate(&h_mcq, &cats.odd, times, &opts)?;

    let fock_pops = |states: &[StateVector]| {
        Array2::from_shape_fn((states.len(), dim), |(k, n)| states[k].amplitudes()[n].norm_sqr())
    };
    let populations_mq = fock_pops(&mq.states);
    let populations_mcq = fock_pops(&mcq.states);
    let p_leak_mq = populations_mq.rows().into_iter().map(|r| (1.0 - r[0] - r[1]).clamp(0.0, 1.0)).collect();
    let p_leak_mcq = mcq
        .states
        .iter()
        .map(|s| (1.0 - cats.even.inner(s).norm_sqr() - cats.odd.inner(s).norm_sqr()).clamp(0.0, 1.0))
        .collect();
    Ok(LeakageReport { times: times.to_vec(), p_leak_mq, p_leak_mcq, populations_mq, populations_mcq, omega_d, dim })
}

#[derive(Clone, Debug)]
pub struct PhaseFlipSeries {
    pub qubit: QubitKind,
    pub times: Vec<f64>,
    /// `𝔸 = ⟨−|ρ|−⟩`
    pub probability: Vec<f64>,
    pub stats: IntegratorStats,
}

/// Phase-flip probability from `|+⟩` under single-phonon loss `κ𝒟[â]`.
///
/// Both qubits are evolved in the frame rotating at `ω`: the MQ under
/// `−Dâ†â†ââ`, the MCQ under the undriven cat Hamiltonian. In the lab
/// frame the MQ superposition would precess at `ω` and `𝔸₁` would measure
/// that precession rather than decoherence.
pub fn phase_flip_study(
    params: &MechanicalParams,
    times: &[f64],
    qubit: QubitKind,
    opts: &IntegratorOptions,
) -> Result<PhaseFlipSeries> {
    phase_flip_study_with_dim(params, times, qubit, opts, 2)
}

/// [`phase_flip_study`] in a Fock space of at least `min_dim` levels.
pub fn phase_flip_study_with_dim(
    params: &MechanicalParams,
    times: &[f64],
    qubit: QubitKind,
    opts: &IntegratorOptions,
    min_dim: usize,
) -> Result<PhaseFlipSeries> {
    params.validate()?;
    let space = study_space(params, min_dim)?;
    let dim = space.dim();
    let (h, zero, one) = match qubit {
        QubitKind::Mq => {
            let h = space.kerr().mapv(|z| z * -params.duffing);
            (h, StateVector::basis(dim, 0)?, StateVector::basis(dim, 1)?)
        }
        QubitKind::Mcq => {
            let cats = cat_basis(params, &space)?;
            (h2(params, &space, false, 0.0), cats.odd, cats.even)
        }
    };
    // |±⟩ = (|1⟩ ± |0⟩)/√2 and (|C₊⟩ ± |C₋⟩)/√2
    let plus = superpose(&one, &zero, 1.0)?;
    let minus = superpose(&one, &zero, -1.0)?;
    let jumps = vec![(space.lowering().clone(), params.kappa())];
    let opts = opts.with_max_step(2.0 * PI / params.omega / 50.0);
    let traj =
        lindblad_integrate_eigenframe(&h, &jumps, &DensityMatrix::from_pure(&plus), times, &opts, SpaceKind::FullFock)?;
    Ok(PhaseFlipSeries {
        qubit,
        times: times.to_vec(),
        probability: traj.populations(&minus).into_iter().map(|p| p.clamp(0.0, 1.0)).collect(),
        stats: traj.stats,
    })
}

/// `|C₊⟩` population under the full driven cat Hamiltonian and under the
/// effective `Ω₂cos(ωt)σˣ`, both from `|C₋⟩`.
#[derive(Clone, Debug)]
pub struct EffectiveComparison {
    pub times: Vec<f64>,
    pub full: Vec<f64>,
    pub effective: Vec<f64>,
    pub max_deviation: f64,
    /// `Ω₂ ≤ 0.1·ω_gap`
    pub within_validated_regime: bool,
    pub stats: IntegratorStats,
}

pub fn effective_vs_full(
    params: &MechanicalParams,
    times: &[f64],
    opts: &IntegratorOptions,
) -> Result<EffectiveComparison> {
    effective_vs_full_with_dim(params, times, opts, 2)
}

/// [`effective_vs_full`] in a Fock space of at least `min_dim` levels.
pub fn effective_vs_full_with_dim(
    params: &MechanicalParams,
    times: &[f64],
    opts: &IntegratorOptions,
    min_dim: usize,
) -> Result<EffectiveComparison> {
    params.validate()?;
    let space = study_space(params, min_dim)?;
    let cats = cat_basis(params, &space)?;
    // Removing the cat-pair energy Dα⁴ only changes a global phase but
    // spares the integrator from resolving it.
    let shift = params.duffing * params.alpha().powi(4);
    let h = h2_driven(params, &space)?.with_term(space.identity().mapv(|z| z * -shift), Modulation::Constant)?;
    let opts = opts.with_max_step(qubit_max_step(params));
    let traj = schrodinger_integrate(&h, &cats.odd, times, &opts)?;
    let full = traj.populations(&cats.even);
    let effective =
        times.iter().map(|&t| evolve_closed_mcq(params, t - times[0]).map(|e| e.mean)).collect::<Result<Vec<_>>>()?;
    let max_deviation = full.iter().zip(&effective).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let gap = 4.0 * params.duffing * params.alpha().powi(2);
    Ok(EffectiveComparison {
        times: times.to_vec(),
        full,
        effective,
        max_deviation,
        // Ω₂ round-trips through the counter-force, hence the slack.
        within_validated_regime: params.rabi_mcq().abs() <= 0.1 * gap * (1.0 + 1e-9),
        stats: traj.stats,
    })
}
