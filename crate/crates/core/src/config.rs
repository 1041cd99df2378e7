//! Experiment configuration: a flat TOML file of SI-valued keys.
//!
//! ```toml
//! mass = 1e-9
//! omega = 62831.853
//! drive_mcq = 0.7853981633974483
//! sweep_variable = "mass"
//! sweep_min = 1e-12
//! sweep_max = 1e-8
//! sweep_points = 41
//! sweep_scale = "log"
//! sweep_quantity = "s2"
//! ```
//!
//! Unknown keys and nested tables are rejected. Mechanical parameters that
//! are not given take their default values, except that `counter_force`
//! defaults to `mass·gravity` of the configured particle.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::baselines::BaselineParams;
use crate::environment::{GasParams, GasRegime};
use crate::model::MechanicalParams;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Linear,
    Log,
}

/// Quantities a sweep axis may vary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    Mass,
    Omega,
    Duffing,
    Pump,
    Temperature,
    QualityFactor,
    /// Cat amplitude; sets `pump = α²·duffing`.
    Alpha,
    /// `Ω₁/ω`
    DriveMq,
    /// `Ω₂/ω`
    DriveMcq,
    GasPressure,
    /// Sensing time in s.
    Time,
}

impl SweepVariable {
    pub const ALL: [SweepVariable; 11] = [
        Self::Mass,
        Self::Omega,
        Self::Duffing,
        Self::Pump,
        Self::Temperature,
        Self::QualityFactor,
        Self::Alpha,
        Self::DriveMq,
        Self::DriveMcq,
        Self::GasPressure,
        Self::Time,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Mass => "mass",
            Self::Omega => "omega",
            Self::Duffing => "duffing",
            Self::Pump => "pump",
            Self::Temperature => "temperature",
            Self::QualityFactor => "quality_factor",
            Self::Alpha => "alpha",
            Self::DriveMq => "drive_mq",
            Self::DriveMcq => "drive_mcq",
            Self::GasPressure => "gas_pressure",
            Self::Time => "time",
        }
    }
}

impl fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepVariable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown sweep variable `{s}`")))
    }
}

/// Scalars the `sweep` command can evaluate at each grid point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    /// Ideal MQ sensitivity.
    S1,
    /// Thermal MQ sensitivity from the master equation.
    S1Diss,
    S2,
    /// Thermal MCQ sensitivity, closed form.
    S2Diss,
    /// Thermal MCQ sensitivity from the master equation.
    S2Num,
    Qfi1,
    Qfi2,
    SScala,
    SWang,
    KappaGas,
    QualityFactor,
}

impl Quantity {
    pub const ALL: [Quantity; 11] = [
        Self::S1,
        Self::S1Diss,
        Self::S2,
        Self::S2Diss,
        Self::S2Num,
        Self::Qfi1,
        Self::Qfi2,
        Self::SScala,
        Self::SWang,
        Self::KappaGas,
        Self::QualityFactor,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::S1 => "s1",
            Self::S1Diss => "s1_diss",
            Self::S2 => "s2",
            Self::S2Diss => "s2_diss",
            Self::S2Num => "s2_num",
            Self::Qfi1 => "qfi1",
            Self::Qfi2 => "qfi2",
            Self::SScala => "s_scala",
            Self::SWang => "s_wang",
            Self::KappaGas => "kappa_gas",
            Self::QualityFactor => "quality_factor",
        }
    }
}

impl FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|q| q.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown sweep quantity `{s}`")))
    }
}

/// Upper bound on the points of one sweep axis.
pub const MAX_SWEEP_POINTS: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepAxis {
    pub variable: SweepVariable,
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub scale: Scale,
}

impl SweepAxis {
    pub fn new(variable: SweepVariable, min: f64, max: f64, points: usize, scale: Scale) -> Result<Self> {
        let axis = Self { variable, min, max, points, scale };
        axis.validate()?;
        Ok(axis)
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=MAX_SWEEP_POINTS).contains(&self.points) {
            return Err(Error::Config(format!(
                "sweep over `{}` needs between 2 and {MAX_SWEEP_POINTS} points",
                self.variable
            )));
        }
        if !(self.min.is_finite() && self.max.is_finite() && self.min < self.max) {
            return Err(Error::Config(format!("sweep over `{}` needs finite min < max", self.variable)));
        }
        if self.scale == Scale::Log && self.min <= 0.0 {
            return Err(Error::Config(format!("log sweep over `{}` needs min > 0", self.variable)));
        }
        Ok(())
    }

    /// Grid values; the end points are reproduced exactly.
    pub fn values(&self) -> Vec<f64> {
        let last = self.points - 1;
        (0..self.points)
            .map(|k| {
                if k == 0 {
                    return self.min;
                }
                if k == last {
                    return self.max;
                }
                let u = k as f64 / last as f64;
                match self.scale {
                    Scale::Linear => self.min + u * (self.max - self.min),
                    Scale::Log => (self.min.ln() + u * (self.max.ln() - self.min.ln())).exp(),
                }
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub params: MechanicalParams,
    /// `Ω₁/ω` used wherever the MQ needs a finite drive.
    pub drive_mq: f64,
    /// `Ω₂/ω` used wherever the MCQ needs a finite drive.
    pub drive_mcq: f64,
    pub gas: Option<GasParams>,
    /// Pa·s; selects the Knudsen-corrected gas model when present.
    pub gas_viscosity: Option<f64>,
    pub baseline: Option<BaselineParams>,
    pub sweeps: Vec<SweepAxis>,
    pub quantity: Option<Quantity>,
    pub integrator_tol: f64,
    pub output: Option<PathBuf>,
    /// Always true; every computation is deterministic.
    pub deterministic: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            params: MechanicalParams::default(),
            drive_mq: 0.02,
            drive_mcq: std::f64::consts::FRAC_PI_4,
            gas: None,
            gas_viscosity: None,
            baseline: None,
            sweeps: Vec::new(),
            quantity: None,
            integrator_tol: 1e-10,
            output: None,
            deterministic: true,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    mass: Option<f64>,
    omega: Option<f64>,
    duffing: Option<f64>,
    pump: Option<f64>,
    gravity: Option<f64>,
    counter_force: Option<f64>,
    temperature: Option<f64>,
    quality_factor: Option<f64>,
    mass_density: Option<f64>,
    dielectric: Option<f64>,
    drive_mq: Option<f64>,
    drive_mcq: Option<f64>,
    gas_pressure: Option<f64>,
    gas_molecule_mass: Option<f64>,
    gas_temperature: Option<f64>,
    gas_viscosity: Option<f64>,
    baseline_gamma_e_bprime: Option<f64>,
    baseline_t_s: Option<f64>,
    baseline_t_w: Option<f64>,
    baseline_tau: Option<f64>,
    baseline_t_big_w: Option<f64>,
    sweep_variable: Option<String>,
    sweep_min: Option<f64>,
    sweep_max: Option<f64>,
    sweep_points: Option<i64>,
    sweep_scale: Option<Scale>,
    sweep2_variable: Option<String>,
    sweep2_min: Option<f64>,
    sweep2_max: Option<f64>,
    sweep2_points: Option<i64>,
    sweep2_scale: Option<Scale>,
    sweep_quantity: Option<String>,
    integrator_tol: Option<f64>,
    output: Option<String>,
    deterministic: Option<bool>,
}

const INTEGER_KEYS: [&str; 2] = ["sweep_points", "sweep2_points"];

fn flatten_check(table: &mut toml::Table) -> Result<()> {
    for (key, value) in table.iter_mut() {
        match value {
            toml::Value::Table(_) => {
                return Err(Error::Config(format!("`{key}` is a table; the config must be flat")));
            }
            toml::Value::Array(_) | toml::Value::Datetime(_) => {
                return Err(Error::Config(format!("`{key}` must be a scalar")));
            }
            // Integers are accepted wherever a real number is expected.
            toml::Value::Integer(i) if !INTEGER_KEYS.contains(&key.as_str()) => {
                *value = toml::Value::Float(*i as f64);
            }
            _ => {}
        }
    }
    Ok(())
}

fn axis(
    prefix: &str,
    variable: Option<String>,
    min: Option<f64>,
    max: Option<f64>,
    points: Option<i64>,
    scale: Option<Scale>,
) -> Result<Option<SweepAxis>> {
    let Some(variable) = variable else {
        for (suffix, present) in [("min", min.is_some()), ("max", max.is_some()), ("points", points.is_some())] {
            if present {
                return Err(Error::MissingField(format!("{prefix}_variable (needed by {prefix}_{suffix})")));
            }
        }
        return Ok(None);
    };
    let variable: SweepVariable = variable.parse()?;
    let min = min.ok_or_else(|| Error::MissingField(format!("{prefix}_min")))?;
    let max = max.ok_or_else(|| Error::MissingField(format!("{prefix}_max")))?;
    let points = points.ok_or_else(|| Error::MissingField(format!("{prefix}_points")))?;
    let points = usize::try_from(points).map_err(|_| Error::Config(format!("{prefix}_points must be >= 2")))?;
    SweepAxis::new(variable, min, max, points, scale.unwrap_or(Scale::Linear)).map(Some)
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let mut table: toml::Table =
            text.parse().map_err(|e: toml::de::Error| Error::Config(e.message().to_string()))?;
        flatten_check(&mut table)?;
        let raw =
            RawConfig::deserialize(toml::Value::Table(table)).map_err(|e| Error::Config(e.message().to_string()))?;
        Self::from_raw(raw)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text).map_err(|e| e.context(format!("config {}", path.display())))
    }

    fn from_raw(raw: RawConfig) -> Result<Self> {
        let base = MechanicalParams::default();
        let mass = raw.mass.unwrap_or(base.mass);
        let gravity = raw.gravity.unwrap_or(base.gravity);
        let params = MechanicalParams {
            mass,
            omega: raw.omega.unwrap_or(base.omega),
            duffing: raw.duffing.unwrap_or(base.duffing),
            pump: raw.pump.unwrap_or(base.pump),
            gravity,
            counter_force: raw.counter_force.unwrap_or(mass * gravity),
            temperature: raw.temperature.unwrap_or(base.temperature),
            quality_factor: raw.quality_factor.unwrap_or(base.quality_factor),
            mass_density: raw.mass_density.unwrap_or(base.mass_density),
            dielectric: raw.dielectric.unwrap_or(base.dielectric),
        };
        params.validate()?;

        let gas = match (raw.gas_pressure, raw.gas_molecule_mass, raw.gas_temperature) {
            (None, None, None) => None,
            (Some(pressure), molecule_mass, temperature) => {
                let nitrogen = GasParams::nitrogen(pressure, params.temperature);
                let gas = GasParams {
                    pressure,
                    molecule_mass: molecule_mass.unwrap_or(nitrogen.molecule_mass),
                    temperature: temperature.unwrap_or(nitrogen.temperature),
                };
                gas.validate()?;
                Some(gas)
            }
            (None, _, _) => return Err(Error::MissingField("gas_pressure".into())),
        };
        if let Some(eta) = raw.gas_viscosity {
            if !(eta.is_finite() && eta > 0.0) {
                return Err(Error::invalid("gas_viscosity", "must be positive"));
            }
        }

        let baseline_keys =
            [raw.baseline_gamma_e_bprime, raw.baseline_t_s, raw.baseline_t_w, raw.baseline_tau, raw.baseline_t_big_w];
        let baseline = if baseline_keys.iter().all(Option::is_none) {
            None
        } else {
            let reference = BaselineParams::reference(params.omega)?;
            let bp = BaselineParams {
                gamma_e_bprime: raw.baseline_gamma_e_bprime.unwrap_or(reference.gamma_e_bprime),
                t_s: raw.baseline_t_s.unwrap_or(reference.t_s),
                t_w: raw.baseline_t_w.unwrap_or(reference.t_w),
                tau: raw.baseline_tau.unwrap_or(reference.tau),
                t_big_w: raw.baseline_t_big_w.unwrap_or(reference.t_big_w),
            };
            bp.validate()?;
            Some(bp)
        };

        let mut sweeps = Vec::new();
        sweeps.extend(axis(
            "sweep",
            raw.sweep_variable,
            raw.sweep_min,
            raw.sweep_max,
            raw.sweep_points,
            raw.sweep_scale,
        )?);
        let second =
            axis("sweep2", raw.sweep2_variable, raw.sweep2_min, raw.sweep2_max, raw.sweep2_points, raw.sweep2_scale)?;
        if let Some(second) = second {
            if sweeps.is_empty() {
                return Err(Error::MissingField("sweep_variable (sweep2 given without sweep)".into()));
            }
            if second.variable == sweeps[0].variable {
                return Err(Error::Config(format!("both sweep axes vary `{}`", second.variable)));
            }
            sweeps.push(second);
        }

        let defaults = Self::default();
        let integrator_tol = raw.integrator_tol.unwrap_or(defaults.integrator_tol);
        if !(1e-12..=1e-4).contains(&integrator_tol) {
            return Err(Error::invalid("integrator_tol", format!("{integrator_tol} outside [1e-12, 1e-4]")));
        }
        if raw.deterministic == Some(false) {
            return Err(Error::Config("deterministic = false is not supported".into()));
        }
        let cfg = Self {
            params,
            drive_mq: raw.drive_mq.unwrap_or(defaults.drive_mq),
            drive_mcq: raw.drive_mcq.unwrap_or(defaults.drive_mcq),
            gas,
            gas_viscosity: raw.gas_viscosity,
            baseline,
            sweeps,
            quantity: raw.sweep_quantity.as_deref().map(str::parse).transpose()?,
            integrator_tol,
            output: raw.output.map(PathBuf::from),
            deterministic: true,
        };
        for (name, v) in [("drive_mq", cfg.drive_mq), ("drive_mcq", cfg.drive_mcq)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(name, format!("{v} must be positive")));
            }
        }
        Ok(cfg)
    }

    /// Gas damping model: Knudsen-corrected when a viscosity is configured.
    pub fn gas_regime(&self) -> GasRegime {
        match self.gas_viscosity {
            Some(viscosity) => GasRegime::Full { viscosity },
            None => GasRegime::HighVacuum,
        }
    }

    pub fn baseline_or_reference(&self) -> Result<BaselineParams> {
        match self.baseline {
            Some(bp) => Ok(bp),
            None => BaselineParams::reference(self.params.omega),
        }
    }

    /// The axis varying `variable`, if any.
    pub fn axis(&self, variable: SweepVariable) -> Option<&SweepAxis> {
        self.sweeps.iter().find(|a| a.variable == variable)
    }

    /// Renders the config back to the flat key set it was read from.
    pub fn to_toml_string(&self) -> String {
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        };
        let p = &self.params;
        for (k, v) in [
            ("mass", p.mass),
            ("omega", p.omega),
            ("duffing", p.duffing),
            ("pump", p.pump),
            ("gravity", p.gravity),
            ("counter_force", p.counter_force),
            ("temperature", p.temperature),
            ("quality_factor", p.quality_factor),
            ("mass_density", p.mass_density),
            ("dielectric", p.dielectric),
            ("drive_mq", self.drive_mq),
            ("drive_mcq", self.drive_mcq),
            ("integrator_tol", self.integrator_tol),
        ] {
            put(k, format!("{v:?}"));
        }
        if let Some(g) = &self.gas {
            put("gas_pressure", format!("{:?}", g.pressure));
            put("gas_molecule_mass", format!("{:?}", g.molecule_mass));
            put("gas_temperature", format!("{:?}", g.temperature));
        }
        if let Some(eta) = self.gas_viscosity {
            put("gas_viscosity", format!("{eta:?}"));
        }
        if let Some(b) = &self.baseline {
            put("baseline_gamma_e_bprime", format!("{:?}", b.gamma_e_bprime));
            put("baseline_t_s", format!("{:?}", b.t_s));
            put("baseline_t_w", format!("{:?}", b.t_w));
            put("baseline_tau", format!("{:?}", b.tau));
            put("baseline_t_big_w", format!("{:?}", b.t_big_w));
        }
        for (i, a) in self.sweeps.iter().enumerate() {
            let prefix = if i == 0 { "sweep" } else { "sweep2" };
            put(&format!("{prefix}_variable"), format!("\"{}\"", a.variable));
            put(&format!("{prefix}_min"), format!("{:?}", a.min));
            put(&format!("{prefix}_max"), format!("{:?}", a.max));
            put(&format!("{prefix}_points"), a.points.to_string());
            let scale = match a.scale {
                Scale::Linear => "linear",
                Scale::Log => "log",
            };
            put(&format!("{prefix}_scale"), format!("\"{scale}\""));
        }
        if let Some(q) = self.quantity {
            put("sweep_quantity", format!("\"{}\"", q.name()));
        }
        if let Some(o) = &self.output {
            put("output", toml::Value::String(o.display().to_string()).to_string());
        }
        out
    }
}
