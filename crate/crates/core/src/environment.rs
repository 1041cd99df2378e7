//! Dissipation channels of the levitated particle: residual-gas collisions
//! and blackbody radiation. Every rate is an angular rate in rad/s; divide by
//! 2π for the Hz figures quoted in tables.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::constants::{AMU, C_LIGHT, HBAR, K_B};
use crate::model::MechanicalParams;
use crate::{Error, Result};

/// Bose-Einstein occupation `1/(exp(ħω/k_BT) − 1)`.
///
/// Returns 0 at `T = 0` and whenever `ħω/k_BT > 700`, where the exponential
/// would overflow.
pub fn thermal_occupation(omega: f64, temperature: f64) -> f64 {
    if temperature <= 0.0 {
        return 0.0;
    }
    let x = HBAR * omega / (K_B * temperature);
    if x > 700.0 {
        return 0.0;
    }
    1.0 / x.exp_m1()
}

/// Residual gas surrounding the particle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GasParams {
    /// Pa
    pub pressure: f64,
    /// kg
    pub molecule_mass: f64,
    /// K
    pub temperature: f64,
}

impl GasParams {
    /// Nitrogen-like gas (28 amu).
    pub fn nitrogen(pressure: f64, temperature: f64) -> Self {
        Self { pressure, molecule_mass: 28.0 * AMU, temperature }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in
            [("pressure", self.pressure), ("molecule_mass", self.molecule_mass), ("temperature", self.temperature)]
        {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(name, format!("must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// Mean free path from the kinetic relation `η = 𝔓 L̄ √(2m_gas/(π k_B T))`.
    pub fn mean_free_path(&self, viscosity: f64) -> f64 {
        viscosity / (self.pressure * (2.0 * self.molecule_mass / (PI * K_B * self.temperature)).sqrt())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GasRegime {
    /// Free-molecular limit `K_n → ∞`.
    HighVacuum,
    /// Knudsen-corrected drag; needs the gas viscosity η in Pa·s.
    Full { viscosity: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GasDamping {
    /// rad/s
    pub kappa: f64,
    /// Only known when a viscosity is supplied.
    pub knudsen: Option<f64>,
    /// Raised when the free-molecular limit is used outside `K_n ≥ 10`.
    pub knudsen_warning: bool,
}

/// Sphere radius `(3m/(4πϱ))^{1/3}`.
pub fn particle_radius(params: &MechanicalParams) -> f64 {
    (3.0 * params.mass / (4.0 * PI * params.mass_density)).cbrt()
}

pub fn gas_damping(params: &MechanicalParams, gas: &GasParams, regime: GasRegime) -> Result<GasDamping> {
    gas.validate()?;
    if !(params.mass_density > 0.0) {
        return Err(Error::invalid("mass_density", "must be positive"));
    }
    let m = params.mass;
    match regime {
        GasRegime::HighVacuum => {
            let rate_hz = 0.571 * gas.pressure / (m * params.mass_density.powi(2)).cbrt()
                * (gas.molecule_mass / (K_B * gas.temperature)).sqrt();
            Ok(GasDamping { kappa: 2.0 * PI * rate_hz, knudsen: None, knudsen_warning: false })
        }
        GasRegime::Full { viscosity } => {
            if !(viscosity.is_finite() && viscosity > 0.0) {
                return Err(Error::invalid("viscosity", "must be positive"));
            }
            let r = particle_radius(params);
            let kn = gas.mean_free_path(viscosity) / r;
            let c_k = 0.31 * kn / (0.785 + 1.152 * kn + kn * kn);
            let rate_hz = 3.0 * viscosity * (r / m) * 0.619 / (0.617 + kn) * (1.0 + c_k);
            Ok(GasDamping { kappa: 2.0 * PI * rate_hz, knudsen: Some(kn), knudsen_warning: kn < 10.0 })
        }
    }
}

/// Momentum diffusion `𝔻` from blackbody scattering, in kg²m²/s³.
pub fn blackbody_diffusion(params: &MechanicalParams) -> f64 {
    let t = params.temperature;
    if t <= 0.0 {
        return 0.0;
    }
    let r = particle_radius(params);
    let eps = params.dielectric;
    let pol = ((eps - 1.0) / (eps + 2.0)).abs();
    let two_d = HBAR
        * HBAR
        * (1024.0 * PI * PI / 135.0)
        * r.powi(6)
        * C_LIGHT
        * pol
        * pol
        * (K_B * t / (HBAR * C_LIGHT)).powi(9);
    0.5 * two_d
}

/// `κ_b = 𝔻/(m k_B T)`, from `2𝔻 = 2mκ_b k_B T`.
pub fn blackbody_damping(params: &MechanicalParams) -> f64 {
    if params.temperature <= 0.0 {
        return 0.0;
    }
    blackbody_diffusion(params) / (params.mass * K_B * params.temperature)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DampingReport {
    pub kappa_gas: f64,
    pub kappa_blackbody: f64,
    pub kappa_total: f64,
    pub quality_factor: f64,
    pub radius: f64,
    pub knudsen: Option<f64>,
    pub knudsen_warning: bool,
}

impl DampingReport {
    /// True when gas collisions dominate to the extent `κ_b/κ_gas < 1e-20`.
    pub fn gas_dominated(&self) -> bool {
        self.kappa_blackbody < 1e-20 * self.kappa_gas
    }
}

pub fn damping_report(params: &MechanicalParams, gas: &GasParams, regime: GasRegime) -> Result<DampingReport> {
    let g = gas_damping(params, gas, regime)?;
    let kb = blackbody_damping(params);
    let total = g.kappa + kb;
    Ok(DampingReport {
        kappa_gas: g.kappa,
        kappa_blackbody: kb,
        kappa_total: total,
        quality_factor: params.omega / total,
        radius: particle_radius(params),
        knudsen: g.knudsen,
        knudsen_warning: g.knudsen_warning,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn table() -> MechanicalParams {
        MechanicalParams::default()
    }

    #[test]
    fn occupation_limits() {
        assert_eq!(thermal_occupation(1.0, 0.0), 0.0);
        let omega = 2.0 * PI * 1e4;
        // k_BT = ħω
        let t_unit = HBAR * omega / K_B;
        assert!((thermal_occupation(omega, t_unit) - 1.0 / (std::f64::consts::E - 1.0)).abs() < 1e-12);
        assert_eq!(thermal_occupation(omega, t_unit / 800.0), 0.0);
    }

    #[test]
    fn occupation_matches_high_temperature_series() {
        let omega = 2.0 * PI * 1e4;
        let x = HBAR * omega / (K_B * 0.01);
        let series = 1.0 / x - 0.5 + x / 12.0;
        let n = thermal_occupation(omega, 0.01);
        assert!((n - series).abs() / series < 1e-9);
        assert!((n - 2.084e4).abs() / 2.084e4 < 5e-3);
    }

    #[test]
    fn radius_of_default_particle() {
        let r = particle_radius(&table());
        assert!((r - 4.08e-5).abs() / 4.08e-5 < 1e-2);
    }

    #[test]
    fn high_vacuum_rate_at_1e_minus_5_pa() {
        let gas = GasParams::nitrogen(1e-5, 0.01);
        let g = gas_damping(&table(), &gas, GasRegime::HighVacuum).unwrap();
        let hz = g.kappa / (2.0 * PI);
        assert!((hz - 1.44e-5).abs() / 1.44e-5 < 0.02, "{hz:e}");
    }

    #[test]
    fn full_regime_approaches_free_molecular_limit() {
        // Free-molecular coefficient: 3·0.619·(3/4π)^{2/3}·√(2/π) ≈ 0.5702.
        let coeff = 3.0 * 0.619 * (3.0 / (4.0 * PI)).powf(2.0 / 3.0) * (2.0 / PI).sqrt();
        assert!((coeff - 0.571).abs() < 1e-3);
        let p = table();
        let gas = GasParams::nitrogen(1e-5, 0.01);
        let hv = gas_damping(&p, &gas, GasRegime::HighVacuum).unwrap().kappa;
        let r = particle_radius(&p);
        let mut last_gap = f64::INFINITY;
        for kn in [20.0, 100.0, 300.0, 1e3, 1e4] {
            let eta = kn * r * gas.pressure * (2.0 * gas.molecule_mass / (PI * K_B * gas.temperature)).sqrt();
            let full = gas_damping(&p, &gas, GasRegime::Full { viscosity: eta }).unwrap();
            assert!((full.knudsen.unwrap() - kn).abs() / kn < 1e-12);
            let gap = (full.kappa - hv).abs() / hv;
            assert!(gap < last_gap);
            if kn > 100.0 {
                assert!(gap < 0.05, "Kn = {kn}: gap {gap}");
            }
            last_gap = gap;
        }
    }

    #[test]
    fn blackbody_scaling_and_vacuum_permittivity() {
        let mut p = table();
        let k1 = blackbody_damping(&p);
        p.temperature *= 2.0;
        let k2 = blackbody_damping(&p);
        assert!((k2 / k1 - 256.0).abs() < 1e-9);
        p.dielectric = 1.0;
        assert_eq!(blackbody_damping(&p), 0.0);
    }

    #[test]
    fn report_is_self_consistent() {
        let p = table();
        let rep = damping_report(&p, &GasParams::nitrogen(1e-5, 0.01), GasRegime::HighVacuum).unwrap();
        assert_eq!(rep.kappa_total, rep.kappa_gas + rep.kappa_blackbody);
        assert!((rep.quality_factor * rep.kappa_total - p.omega).abs() <= 1e-15 * p.omega);
        assert!(rep.gas_dominated());
        assert!((rep.kappa_total - rep.kappa_gas).abs() <= 1e-15 * rep.kappa_gas);
    }

    proptest! {
        #[test]
        fn high_vacuum_is_linear_in_pressure_and_inverse_sqrt_in_temperature(
            p in 1e-10f64..1e-3, t in 1e-3f64..300.0, scale in 0.1f64..10.0,
        ) {
            let mp = table();
            let base = gas_damping(&mp, &GasParams::nitrogen(p, t), GasRegime::HighVacuum).unwrap().kappa;
            let dp = gas_damping(&mp, &GasParams::nitrogen(p * scale, t), GasRegime::HighVacuum).unwrap().kappa;
            let dt = gas_damping(&mp, &GasParams::nitrogen(p, t * scale), GasRegime::HighVacuum).unwrap().kappa;
            prop_assert!((dp / base - scale).abs() < 1e-12 * scale);
            prop_assert!((dt / base - 1.0 / scale.sqrt()).abs() < 1e-12);
        }

        #[test]
        fn blackbody_ignores_pressure_and_gas_ignores_permittivity(eps in 1.0f64..20.0) {
            let mut mp = table();
            let gas = GasParams::nitrogen(1e-5, 0.01);
            let g0 = gas_damping(&mp, &gas, GasRegime::HighVacuum).unwrap().kappa;
            mp.dielectric = eps;
            let g1 = gas_damping(&mp, &gas, GasRegime::HighVacuum).unwrap().kappa;
            prop_assert_eq!(g0, g1);
            let r1 = damping_report(&mp, &gas, GasRegime::HighVacuum).unwrap();
            let r2 = damping_report(&mp, &GasParams::nitrogen(3e-7, 0.01), GasRegime::HighVacuum).unwrap();
            prop_assert_eq!(r1.kappa_blackbody, r2.kappa_blackbody);
        }
    }
}
