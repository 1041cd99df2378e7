//! Comparison sensitivities of two spin-based gravimetry schemes, with a
//! calibration helper for their coupling constant.
//!
//! `S_S = ω√t_S/|2γB′t_S|` and `S_W = ω√t_W/|4γB′τ + 2γB′ωT_W|`, where
//! `γB′` is the product of the gyromagnetic ratio and the field gradient
//! (units are whatever makes `S` come out in m·s⁻²/√Hz).

use serde::{Deserialize, Serialize};

use crate::constants::MICRO_GAL;
use crate::{Error, Result};

/// Sensitivities the default coupling is pinned to, in µGal/√Hz.
pub const SCALA_REFERENCE: f64 = 501.80;
pub const WANG_REFERENCE: f64 = 17.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Baseline {
    Scala,
    Wang,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaselineParams {
    pub gamma_e_bprime: f64,
    /// s
    pub t_s: f64,
    /// s
    pub t_w: f64,
    /// s
    pub tau: f64,
    /// s
    pub t_big_w: f64,
}

impl Default for BaselineParams {
    fn default() -> Self {
        Self::reference(2.0 * std::f64::consts::PI * 1e4).expect("reference calibration is invertible")
    }
}

impl BaselineParams {
    /// Parameters reproducing the reference sensitivities at `omega`:
    /// `t_S = 2 ms`, `t_W = 1 ms`, `τ = 0.5 ms`, the coupling calibrated
    /// against `S_S` and `T_W` solved from `S_W` with that shared coupling.
    pub fn reference(omega: f64) -> Result<Self> {
        let mut bp = Self { gamma_e_bprime: 1.0, t_s: 2e-3, t_w: 1e-3, tau: 0.5e-3, t_big_w: 0.0 };
        bp.gamma_e_bprime = calibrate(SCALA_REFERENCE * MICRO_GAL, omega, Baseline::Scala, &bp)?;
        // ω√t_W/(2γB′(2τ + ωT_W)) = S_W  ⇒  T_W = (ω√t_W/(2γB′S_W) − 2τ)/ω
        let s_w = WANG_REFERENCE * MICRO_GAL;
        bp.t_big_w = (omega * bp.t_w.sqrt() / (2.0 * bp.gamma_e_bprime * s_w) - 2.0 * bp.tau) / omega;
        if !(bp.t_big_w > 0.0) {
            return Err(Error::NonInvertible("reference S_W needs a negative duration"));
        }
        Ok(bp)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("t_s", self.t_s), ("t_w", self.t_w), ("tau", self.tau), ("t_big_w", self.t_big_w)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(name, format!("{v} must be a non-negative time")));
            }
        }
        if !self.gamma_e_bprime.is_finite() {
            return Err(Error::invalid("gamma_e_bprime", "must be finite"));
        }
        Ok(())
    }
}

fn check_omega(omega: f64) -> Result<()> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::invalid("omega", format!("{omega} must be positive")));
    }
    Ok(())
}

/// `S_S = ω√t_S/|2γB′t_S|`
pub fn s_scala(omega: f64, bp: &BaselineParams) -> Result<f64> {
    check_omega(omega)?;
    bp.validate()?;
    let denom = 2.0 * bp.gamma_e_bprime * bp.t_s;
    if denom == 0.0 {
        return Err(Error::UndefinedBaseline("2γB′t_S vanishes"));
    }
    Ok(omega * bp.t_s.sqrt() / denom.abs())
}

/// `S_W = ω√t_W/|4γB′τ + 2γB′ωT_W|`
pub fn s_wang(omega: f64, bp: &BaselineParams) -> Result<f64> {
    check_omega(omega)?;
    bp.validate()?;
    let denom = 4.0 * bp.gamma_e_bprime * bp.tau + 2.0 * bp.gamma_e_bprime * omega * bp.t_big_w;
    if denom == 0.0 {
        return Err(Error::UndefinedBaseline("4γB′τ + 2γB′ωT_W vanishes"));
    }
    Ok(omega * bp.t_w.sqrt() / denom.abs())
}

/// The `γB′ > 0` for which `scheme` evaluates to `target` at `omega`, with
/// the remaining fields of `known` held fixed.
pub fn calibrate(target: f64, omega: f64, scheme: Baseline, known: &BaselineParams) -> Result<f64> {
    check_omega(omega)?;
    known.validate()?;
    if !(target.is_finite() && target > 0.0) {
        return Err(Error::invalid("target", format!("{target} must be a positive sensitivity")));
    }
    let (numerator, per_coupling) = match scheme {
        Baseline::Scala => (omega * known.t_s.sqrt(), 2.0 * known.t_s),
        Baseline::Wang => (omega * known.t_w.sqrt(), 4.0 * known.tau + 2.0 * omega * known.t_big_w),
    };
    if numerator == 0.0 || per_coupling == 0.0 {
        return Err(Error::NonInvertible("sensitivity does not depend on the coupling"));
    }
    Ok(numerator / (per_coupling * target))
}
