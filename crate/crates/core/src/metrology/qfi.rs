use ndarray::Array2;

use super::{QfiMethod, QfiResult};
use crate::constants::HBAR;
use crate::model::MechanicalParams;
use crate::qcore::{dagger, eigh, DensityMatrix};
use crate::{Error, Result, C64};

fn sld_sum(rho: &DensityMatrix, drho: &Array2<C64>) -> Result<f64> {
    let e = eigh(rho.hermitized().elements())?;
    let lmax = e.values.iter().copied().fold(0.0f64, f64::max);
    let cutoff = 1e-12 * lmax;
    let d = dagger(&e.vectors).dot(drho).dot(&e.vectors);
    let n = e.values.len();
    let mut f = 0.0;
    for j in 0..n {
        for k in 0..n {
            let s = e.values[j] + e.values[k];
            if s > cutoff {
                f += 2.0 * d[[j, k]].norm_sqr() / s;
            }
        }
    }
    Ok(f)
}

fn central_difference<F>(rho_of_g: &F, g: f64, dg: f64) -> Result<Array2<C64>>
where
    F: Fn(f64) -> Result<DensityMatrix>,
{
    // Divide by the step actually taken after rounding g ± dg.
    let (gp, gm) = (g + dg, g - dg);
    let plus = rho_of_g(gp)?;
    let minus = rho_of_g(gm)?;
    if plus.dim() != minus.dim() {
        return Err(Error::DimensionMismatch("density family changes dimension".into()));
    }
    Ok((plus.elements() - minus.elements()).mapv(|z| z / (gp - gm)))
}

/// `ℱ = Σ_{λj+λk>ε} 2|⟨j|∂_gρ|k⟩|²/(λj + λk)` in the eigenbasis of `ρ(g)`,
/// with a central-difference derivative validated against half the step.
///
/// `time` is only recorded in the result.
pub fn qfi_sld<F>(rho_of_g: F, g: f64, dg: f64, time: f64) -> Result<QfiResult>
where
    F: Fn(f64) -> Result<DensityMatrix>,
{
    if !(dg.is_finite() && dg > 0.0) {
        return Err(Error::invalid("dg", format!("{dg} must be positive")));
    }
    let rho = rho_of_g(g)?;
    let full = sld_sum(&rho, &central_difference(&rho_of_g, g, dg)?)?;
    let half = sld_sum(&rho, &central_difference(&rho_of_g, g, 0.5 * dg)?)?;
    let scale = full.abs().max(half.abs());
    if (full - half).abs() > 0.01 * scale && scale > 0.0 {
        return Err(Error::StepInstability { step: dg, value_full: full, value_half: half });
    }
    Ok(QfiResult { value: full.max(0.0), time, method: QfiMethod::SldNumeric })
}

/// QFI of the MQ Rabi state at time `t`:
///
/// `ℱ₁ = 8m²z₀²/(ħ²𝒜⁶)·{32Ω⁶t² + Ω²ω²(3 + 8Ω²t²) + ω⁴ − ω²(4Ω² + ω²)cos𝒜t
///       + Ω²ω²[cos2𝒜t + 4𝒜t·sin𝒜t]}`.
///
/// The bracket vanishes at `t = 0` and reduces to `2ω⁴` at `t = π/ω` as
/// `Ω → 0`, giving `8m/(ħω³)`.
pub fn qfi_mq_closed(params: &MechanicalParams, t: f64) -> Result<QfiResult> {
    params.validate()?;
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::invalid("t", format!("{t} must be a non-negative time")));
    }
    let w = params.omega;
    let o = params.rabi_mq();
    let a = (w * w + 4.0 * o * o).sqrt();
    let (o2, w2) = (o * o, w * w);
    let at = a * t;
    let bracket = 32.0 * o2 * o2 * o2 * t * t + o2 * w2 * (3.0 + 8.0 * o2 * t * t) + w2 * w2
        - w2 * (4.0 * o2 + w2) * at.cos()
        + o2 * w2 * ((2.0 * at).cos() + 4.0 * at * at.sin());
    let z0 = params.z0();
    let pref = 8.0 * params.mass.powi(2) * z0 * z0 / (HBAR * HBAR * a.powi(6));
    Ok(QfiResult { value: (pref * bracket).max(0.0), time: t, method: QfiMethod::ClosedForm })
}

/// `ℱ₂ = (8Nm/(ħω³))sin²(ωt)`
pub fn qfi_mcq_closed(params: &MechanicalParams, t: f64) -> Result<QfiResult> {
    params.validate()?;
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::invalid("t", format!("{t} must be a non-negative time")));
    }
    Ok(QfiResult {
        value: mcq_optimal_qfi(params) * (params.omega * t).sin().powi(2),
        time: t,
        method: QfiMethod::ClosedForm,
    })
}

/// `8m/(ħω³)`
pub fn mq_optimal_qfi(params: &MechanicalParams) -> f64 {
    8.0 * params.mass / (HBAR * params.omega.powi(3))
}

/// `8Nm/(ħω³)`
pub fn mcq_optimal_qfi(params: &MechanicalParams) -> f64 {
    params.alpha().powi(2) * mq_optimal_qfi(params)
}

/// Quantum Cramér–Rao bound `δg = 1/√((𝒯/t)·ℱ)`.
pub fn cramer_rao(qfi: &QfiResult, total_time: f64, shot_time: f64) -> Result<f64> {
    if !(shot_time > 0.0 && total_time >= shot_time) {
        return Err(Error::invalid("total_time", "need total_time >= shot_time > 0"));
    }
    if !(qfi.value > 0.0) {
        return Err(Error::InsensitivePoint(qfi.value));
    }
    Ok(1.0 / (total_time / shot_time * qfi.value).sqrt())
}
