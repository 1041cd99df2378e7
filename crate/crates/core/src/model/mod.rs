//! Physical parameters, Hamiltonians, the cat basis and the two qubit frames.

mod cat;
mod frame;
mod hamiltonian;

use serde::{Deserialize, Serialize};

use crate::constants::{HBAR, STANDARD_GRAVITY};
use crate::environment::thermal_occupation;
use crate::{Error, Result};

pub use cat::{cat_basis, cat_basis_for_alpha, spectrum_check, CatBasis, SpectrumReport};
pub use frame::{mcq_frame, mq_frame, JumpModel, QubitFrame, QubitKind};
pub use hamiltonian::{h1, h1_rotating_with_drive, h2, h2_driven, h2_with_drive};

/// Full parameter set of the levitated oscillator. SI units; every frequency
/// is angular (rad/s).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MechanicalParams {
    /// kg
    pub mass: f64,
    pub omega: f64,
    /// Duffing strength D
    pub duffing: f64,
    /// Two-phonon drive P
    pub pump: f64,
    /// m/s²
    pub gravity: f64,
    /// N, opposing gravity
    pub counter_force: f64,
    /// K
    pub temperature: f64,
    pub quality_factor: f64,
    /// kg/m³
    pub mass_density: f64,
    /// Relative permittivity
    pub dielectric: f64,
}

impl Default for MechanicalParams {
    /// Diamond particle at 10 kHz: m = 1e-9 kg, D = 0.1ω, P = 3.6ω,
    /// Q = 1e8, T = 10 mK, with the counter-force cancelling gravity.
    fn default() -> Self {
        let omega = 2.0 * std::f64::consts::PI * 1e4;
        let mass = 1e-9;
        Self {
            mass,
            omega,
            duffing: 0.1 * omega,
            pump: 3.6 * omega,
            gravity: STANDARD_GRAVITY,
            counter_force: mass * STANDARD_GRAVITY,
            temperature: 0.01,
            quality_factor: 1e8,
            mass_density: 3500.0,
            dielectric: 5.7,
        }
    }
}

impl MechanicalParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("mass", self.mass),
            ("omega", self.omega),
            ("duffing", self.duffing),
            ("pump", self.pump),
            ("gravity", self.gravity),
            ("counter_force", self.counter_force),
            ("temperature", self.temperature),
            ("quality_factor", self.quality_factor),
            ("mass_density", self.mass_density),
            ("dielectric", self.dielectric),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(Error::invalid(name, format!("must be finite, got {v}")));
            }
        }
        if self.mass <= 0.0 {
            return Err(Error::invalid("mass", "must be positive"));
        }
        if self.omega <= 0.0 {
            return Err(Error::invalid("omega", "must be positive"));
        }
        if self.duffing < 0.0 {
            return Err(Error::invalid("duffing", "must be non-negative"));
        }
        if self.pump < 0.0 {
            return Err(Error::invalid("pump", "must be non-negative"));
        }
        if self.pump > 0.0 && self.duffing == 0.0 {
            return Err(Error::invalid("duffing", "a pumped oscillator needs D > 0 for a finite cat amplitude"));
        }
        if self.quality_factor <= 0.0 {
            return Err(Error::invalid("quality_factor", "must be positive"));
        }
        if self.temperature < 0.0 {
            return Err(Error::invalid("temperature", "must be non-negative"));
        }
        Ok(())
    }

    /// `√(ħ/(2mω))`
    pub fn z0(&self) -> f64 {
        (HBAR / (2.0 * self.mass * self.omega)).sqrt()
    }

    /// `√(P/D)`, zero without a pump.
    pub fn alpha(&self) -> f64 {
        if self.pump == 0.0 {
            0.0
        } else {
            (self.pump / self.duffing).sqrt()
        }
    }

    /// `Ω₁ = (mg − F)z₀/ħ`, evaluated as `m(g − F/m)z₀/ħ` so that a change
    /// of `g` enters without cancellation error. An `F` equal to `m·g` as
    /// computed in floating point gives exactly zero.
    pub fn rabi_mq(&self) -> f64 {
        if self.counter_force == self.mass * self.gravity {
            return 0.0;
        }
        self.mass * (self.gravity - self.counter_acceleration()) * self.z0() / HBAR
    }

    /// `F/m`
    pub fn counter_acceleration(&self) -> f64 {
        self.counter_force / self.mass
    }

    /// `Ω₂ = 2αΩ₁`
    pub fn rabi_mcq(&self) -> f64 {
        2.0 * self.alpha() * self.rabi_mq()
    }

    /// `κ = ω/Q`
    pub fn kappa(&self) -> f64 {
        self.omega / self.quality_factor
    }

    pub fn thermal_occupation(&self) -> f64 {
        thermal_occupation(self.omega, self.temperature)
    }

    /// Sets the counter-force so that `Ω₁` takes the requested value.
    ///
    /// `F` sits within about 1e-8 of `mg` for typical drives, so the
    /// achieved `Ω₁` carries a relative rounding error near 1e-8.
    pub fn with_mq_rabi(mut self, omega1: f64) -> Self {
        self.counter_force = self.mass * self.gravity - HBAR * omega1 / self.z0();
        self
    }

    /// Sets the counter-force so that `Ω₂ = 2αΩ₁` takes the requested value.
    pub fn with_mcq_rabi(self, omega2: f64) -> Result<Self> {
        let alpha = self.alpha();
        if alpha == 0.0 {
            return Err(Error::DegenerateBasis);
        }
        Ok(self.with_mq_rabi(omega2 / (2.0 * alpha)))
    }

    /// Same particle and counter-force under a different gravitational
    /// acceleration.
    pub fn with_gravity(mut self, gravity: f64) -> Self {
        self.gravity = gravity;
        self
    }

    /// Sets `P` so that `α = √(P/D)` takes the requested value.
    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.pump = self.duffing * alpha * alpha;
        self
    }
}

/// Quantities that follow from [`MechanicalParams`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DerivedQuantities {
    /// m
    pub z0: f64,
    pub alpha: f64,
    /// `N = α²`
    pub n_phonon: f64,
    /// MQ anharmonicity `2ħD` in J.
    pub delta1: f64,
    /// `4Dα²`
    pub omega_gap: f64,
    pub kappa: f64,
    pub n_th: f64,
    pub omega1: f64,
    pub omega2: f64,
    /// `𝒜 = √(ω² + 4Ω₁²)`
    pub generalized_rabi: f64,
}

pub fn derive(params: &MechanicalParams) -> Result<DerivedQuantities> {
    params.validate()?;
    let alpha = params.alpha();
    let omega1 = params.rabi_mq();
    Ok(DerivedQuantities {
        z0: params.z0(),
        alpha,
        n_phonon: alpha * alpha,
        delta1: 2.0 * HBAR * params.duffing,
        omega_gap: 4.0 * params.duffing * alpha * alpha,
        kappa: params.kappa(),
        n_th: params.thermal_occupation(),
        omega1,
        omega2: 2.0 * alpha * omega1,
        generalized_rabi: (params.omega.powi(2) + 4.0 * omega1 * omega1).sqrt(),
    })
}
