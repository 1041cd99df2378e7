//! Quantum Fisher information and Rabi-measurement sensitivity.
//!
//! Sensitivities are in m·s⁻²/√Hz; [`SensitivityResult::micro_gal`] renders
//! them in µGal/√Hz.

mod qfi;
mod sensitivity;

use serde::Serialize;

use crate::constants::MICRO_GAL;
use crate::model::MechanicalParams;
use crate::{Error, Result};

pub use qfi::{cramer_rao, mcq_optimal_qfi, mq_optimal_qfi, qfi_mcq_closed, qfi_mq_closed, qfi_sld};
pub use sensitivity::{
    mcq_dissipative_optimal, mcq_ideal_optimal, mq_envelope, mq_ideal_optimal, optimal_time, sensitivity_mcq_closed,
    sensitivity_mcq_numeric, sensitivity_mq_closed, sensitivity_mq_numeric, sensitivity_numeric, Scheme,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Provenance {
    Analytic,
    Numeric,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum QfiMethod {
    SldNumeric,
    ClosedForm,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QfiResult {
    /// s⁴/m²
    pub value: f64,
    pub time: f64,
    pub method: QfiMethod,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SensitivityResult {
    /// m·s⁻²/√Hz
    pub value: f64,
    pub sensing_time: f64,
    pub mean_o: f64,
    pub std_o: f64,
    /// ∂Ō/∂g, per m/s².
    pub d_o_dg: f64,
    pub provenance: Provenance,
}

impl SensitivityResult {
    /// `S = √t·δO/|∂Ō/∂g|` with `δO = √(Ō − Ō²)`.
    pub(crate) fn from_statistics(t: f64, mean: f64, d_o_dg: f64, provenance: Provenance) -> Result<Self> {
        if !(mean > 1e-12 && mean < 1.0 - 1e-12) {
            return Err(Error::DegenerateStatistics(mean));
        }
        if !(d_o_dg.abs() >= 1e-30) {
            return Err(Error::InsensitivePoint(d_o_dg));
        }
        let std_o = (mean - mean * mean).sqrt();
        Ok(Self { value: t.sqrt() * std_o / d_o_dg.abs(), sensing_time: t, mean_o: mean, std_o, d_o_dg, provenance })
    }

    pub fn micro_gal(&self) -> f64 {
        self.value / MICRO_GAL
    }
}

/// `max(1e-6·|g − F/m|, 1e-10)` m/s².
pub fn derivative_step(params: &MechanicalParams) -> f64 {
    (1e-6 * (params.gravity - params.counter_acceleration()).abs()).max(1e-10)
}
