use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use super::{evaluate, grid_points, metadata, par_map, Dataset, Output, Point};
use crate::config::{ExperimentConfig, Quantity, Scale, SweepAxis, SweepVariable};
use crate::constants::{HBAR, MICRO_GAL};
use crate::dynamics::{effective_vs_full, leakage_study, phase_flip_study, IntegratorOptions};
use crate::dynamics::{mcq_closed_density, mq_closed_density};
use crate::environment::{gas_damping, GasParams};
use crate::metrology::{
    derivative_step, mq_envelope, qfi_mcq_closed, qfi_mq_closed, qfi_sld, sensitivity_mcq_closed, sensitivity_mq_closed,
};
use crate::model::QubitKind;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FigureId {
    /// MQ QFI against mass for several frequencies.
    Fig2a,
    /// MQ and reference sensitivities against mass.
    Fig2b,
    /// MCQ QFI against mass for several frequencies.
    Fig4a,
    /// MCQ and reference sensitivities against mass.
    Fig4b,
    /// MCQ and reference sensitivities against frequency.
    Fig4c,
    /// MCQ sensitivity over the mass–frequency plane.
    Fig4d,
    /// MQ sensitivity against sensing time with its envelope.
    Sm1,
    /// Leakage out of both qubit subspaces under a resonant drive.
    Sm3c,
    /// Phase-flip probability of both qubits.
    Sm3d,
    /// Full against effective cat-qubit dynamics.
    Sm4,
    /// MCQ sensitivity against sensing time with its envelope.
    Sm5a,
    /// Analytic against numeric dissipative MCQ sensitivity.
    Sm5b,
    /// Gas damping against pressure.
    Sm6,
}

impl FigureId {
    pub const ALL: [FigureId; 13] = [
        Self::Fig2a,
        Self::Fig2b,
        Self::Fig4a,
        Self::Fig4b,
        Self::Fig4c,
        Self::Fig4d,
        Self::Sm1,
        Self::Sm3c,
        Self::Sm3d,
        Self::Sm4,
        Self::Sm5a,
        Self::Sm5b,
        Self::Sm6,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Fig2a => "fig2a",
            Self::Fig2b => "fig2b",
            Self::Fig4a => "fig4a",
            Self::Fig4b => "fig4b",
            Self::Fig4c => "fig4c",
            Self::Fig4d => "fig4d",
            Self::Sm1 => "sm1",
            Self::Sm3c => "sm3c",
            Self::Sm3d => "sm3d",
            Self::Sm4 => "sm4",
            Self::Sm5a => "sm5a",
            Self::Sm5b => "sm5b",
            Self::Sm6 => "sm6",
        }
    }

    /// Axes the figure reads from the config, in output order.
    pub fn required_axes(self) -> &'static [SweepVariable] {
        use SweepVariable::*;
        match self {
            Self::Fig2a | Self::Fig4a | Self::Fig4d => &[Mass, Omega],
            Self::Fig2b | Self::Fig4b | Self::Sm5b => &[Mass],
            Self::Fig4c => &[Omega],
            Self::Sm1 | Self::Sm3c | Self::Sm3d | Self::Sm4 | Self::Sm5a => &[Time],
            Self::Sm6 => &[GasPressure],
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|id| id.name() == s).ok_or_else(|| Error::Config(format!("unknown figure `{s}`")))
    }
}

impl Serialize for FigureId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

fn log_axis(variable: SweepVariable, min: f64, max: f64, points: usize) -> SweepAxis {
    SweepAxis { variable, min, max, points, scale: Scale::Log }
}

fn lin_axis(variable: SweepVariable, min: f64, max: f64, points: usize) -> SweepAxis {
    SweepAxis { variable, min, max, points, scale: Scale::Linear }
}

/// Default parameters and axes for each figure.
pub fn default_config(id: FigureId) -> ExperimentConfig {
    use SweepVariable::*;
    let mut cfg = ExperimentConfig::default();
    let w = cfg.params.omega;
    let khz = 2.0 * PI * 1e3;
    cfg.sweeps = match id {
        FigureId::Fig2a | FigureId::Fig4a => {
            vec![log_axis(Mass, 1e-12, 1e-8, 41), log_axis(Omega, 5.0 * khz, 20.0 * khz, 3)]
        }
        FigureId::Fig2b | FigureId::Fig4b => vec![log_axis(Mass, 1e-16, 1e-8, 33)],
        FigureId::Fig4c => vec![log_axis(Omega, khz, 1e3 * khz, 31)],
        FigureId::Fig4d => vec![log_axis(Mass, 1e-12, 1e-6, 13), log_axis(Omega, khz, 100.0 * khz, 11)],
        FigureId::Sm1 | FigureId::Sm5a => vec![lin_axis(Time, 1e-7, 4e-4, 800)],
        FigureId::Sm3c => {
            cfg.params = cfg.params.with_alpha(2.0);
            vec![lin_axis(Time, 0.0, 5.0 * 2.0 * PI / cfg.params.duffing, 201)]
        }
        FigureId::Sm3d => {
            cfg.params = cfg.params.with_alpha(2.0);
            vec![lin_axis(Time, 0.0, 2e-3, 41)]
        }
        FigureId::Sm4 => {
            let gap = 4.0 * cfg.params.duffing * cfg.params.alpha().powi(2);
            cfg.drive_mcq = 0.1 * gap / w;
            vec![lin_axis(Time, 0.0, 2.0 * 2.0 * PI / w, 81)]
        }
        FigureId::Sm5b => vec![log_axis(Mass, 1e-12, 1e-8, 9)],
        FigureId::Sm6 => {
            cfg.gas = Some(GasParams::nitrogen(1e-5, cfg.params.temperature));
            vec![log_axis(GasPressure, 1e-9, 1e-4, 51)]
        }
    };
    cfg
}

fn axes(id: FigureId, cfg: &ExperimentConfig) -> Result<Vec<SweepAxis>> {
    id.required_axes()
        .iter()
        .map(|&v| {
            cfg.axis(v).copied().ok_or_else(|| Error::MissingField(format!("sweep axis `{v}` (required by {id})")))
        })
        .collect()
}

fn times(axis: &SweepAxis) -> Vec<f64> {
    axis.values()
}

fn opts(cfg: &ExperimentConfig) -> Result<IntegratorOptions> {
    IntegratorOptions::new(cfg.integrator_tol)
}

/// Builds the datasets for one figure.
pub fn run_figure(id: FigureId, cfg: &ExperimentConfig) -> Result<Output> {
    let datasets = build(id, cfg).map_err(|e| e.context(format!("figure {id}")))?;
    let metadata = metadata(id.name(), cfg, &datasets)?;
    Ok(Output { name: id.name().into(), datasets, metadata })
}

fn nan_on_error(r: Result<f64>) -> Result<f64> {
    match r {
        Ok(v) => Ok(v),
        Err(Error::DegenerateStatistics(_) | Error::InsensitivePoint(_)) => Ok(f64::NAN),
        Err(e) => Err(e),
    }
}

fn build(id: FigureId, cfg: &ExperimentConfig) -> Result<Vec<Dataset>> {
    let ax = axes(id, cfg)?;
    let baseline = cfg.baseline_or_reference()?;
    let base = Point::from_config(cfg);
    let mut out = Vec::new();
    match id {
        FigureId::Fig2a | FigureId::Fig4a => {
            let mcq = id == FigureId::Fig4a;
            for (k, omega) in ax[1].values().into_iter().enumerate() {
                let mut curve = base;
                curve.set(SweepVariable::Omega, omega);
                let pts = grid_points(&ExperimentConfig { params: curve.params, ..cfg.clone() }, &ax[..1]);
                let rows = par_map(&pts, |p| {
                    if mcq {
                        let q = p.mcq()?;
                        let t = PI / (2.0 * q.omega);
                        let closed = qfi_mcq_closed(&q, t)?.value;
                        let sld =
                            qfi_sld(|g| mcq_closed_density(&q.with_gravity(g), t), q.gravity, derivative_step(&q), t)?;
                        Ok([closed, sld.value])
                    } else {
                        let q = p.mq();
                        let t = PI / q.omega;
                        let closed = qfi_mq_closed(&q, t)?.value;
                        let sld =
                            qfi_sld(|g| mq_closed_density(&q.with_gravity(g), t), q.gravity, derivative_step(&q), t)?;
                        Ok([closed, sld.value])
                    }
                })?;
                let mut d = Dataset::new(format!("{id}_w{k}"), &["mass", "qfi_closed", "qfi_sld"]);
                d.comments.push(format!("omega = {} rad/s", super::format_number(omega)));
                d.comments.push(if mcq {
                    format!("t = pi/(2 omega), Omega2 = {} omega", super::format_number(cfg.drive_mcq))
                } else {
                    format!("t = pi/omega, Omega1 = {} omega", super::format_number(cfg.drive_mq))
                });
                for ((c, _), r) in pts.iter().zip(rows) {
                    d.rows.push(vec![c[0], r[0], r[1]]);
                }
                out.push(d);
            }
        }
        FigureId::Fig2b | FigureId::Fig4b | FigureId::Fig4c => {
            let (x, q) = match id {
                FigureId::Fig2b => ("mass", [Quantity::S1, Quantity::S1Diss]),
                FigureId::Fig4b => ("mass", [Quantity::S2, Quantity::S2Diss]),
                _ => ("omega", [Quantity::S2, Quantity::S2Diss]),
            };
            let pts = grid_points(cfg, &ax);
            let rows = par_map(&pts, |p| {
                Ok([
                    evaluate(q[0], p, &baseline)?,
                    evaluate(q[1], p, &baseline)?,
                    evaluate(Quantity::SScala, p, &baseline)?,
                    evaluate(Quantity::SWang, p, &baseline)?,
                ])
            })?;
            let mut d = Dataset::new(id.name(), &[x, q[0].name(), q[1].name(), "s_scala", "s_wang"]);
            d.comments.push("sensitivities in uGal/sqrt(Hz) at the optimal sensing time".into());
            for ((c, _), r) in pts.iter().zip(rows) {
                d.rows.push(vec![c[0], r[0], r[1], r[2], r[3]]);
            }
            out.push(d);
        }
        FigureId::Fig4d => {
            let pts = grid_points(cfg, &ax);
            let rows = par_map(&pts, |p| evaluate(Quantity::S2, p, &baseline))?;
            let mut d = Dataset::new(id.name(), &["mass", "omega", "s2"]);
            d.comments.push("s2 in uGal/sqrt(Hz) at t = pi/(2 omega)".into());
            for ((c, _), v) in pts.iter().zip(rows) {
                d.rows.push(vec![c[0], c[1], v]);
            }
            out.push(d);
        }
        FigureId::Sm1 => {
            let q = base.mq();
            let pts = grid_points(cfg, &ax);
            let rows = par_map(&pts, |p| {
                let t = p.time.unwrap_or(0.0);
                let s = nan_on_error(sensitivity_mq_closed(&q, t, false).map(|s| s.micro_gal()))?;
                Ok([s, mq_envelope(&q, t) / MICRO_GAL])
            })?;
            let mut d = Dataset::new(id.name(), &["time", "s1_0", "s1_envelope"]);
            d.comments.push(format!("Omega1 = {} omega; uGal/sqrt(Hz)", super::format_number(cfg.drive_mq)));
            for ((c, _), r) in pts.iter().zip(rows) {
                d.rows.push(vec![c[0], r[0], r[1]]);
            }
            out.push(d);
        }
        FigureId::Sm5a => {
            let q = base.mcq()?;
            let n = q.alpha().powi(2);
            let scale = (HBAR * q.omega / (8.0 * n * q.mass)).sqrt() * q.omega / MICRO_GAL;
            let pts = grid_points(cfg, &ax);
            let rows = par_map(&pts, |p| {
                let t = p.time.unwrap_or(0.0);
                let s = nan_on_error(sensitivity_mcq_closed(&q, t, false).map(|s| s.micro_gal()))?;
                Ok([s, scale * t.sqrt()])
            })?;
            let mut d = Dataset::new(id.name(), &["time", "s2_0", "s2_envelope"]);
            d.comments.push(format!("Omega2 = {} omega; uGal/sqrt(Hz)", super::format_number(cfg.drive_mcq)));
            for ((c, _), r) in pts.iter().zip(rows) {
                d.rows.push(vec![c[0], r[0], r[1]]);
            }
            out.push(d);
        }
        FigureId::Sm5b => {
            let pts = grid_points(cfg, &ax);
            let rows = par_map(&pts, |p| {
                let q = p.mcq()?;
                let t2 = PI / (2.0 * q.omega);
                Ok([sensitivity_mcq_closed(&q, t2, true)?.micro_gal(), evaluate(Quantity::S2Num, p, &baseline)?])
            })?;
            let mut d = Dataset::new(id.name(), &["mass", "s2_diss", "s2_num"]);
            d.comments.push(format!(
                "t = pi/(2 omega), Omega2 = {} omega; uGal/sqrt(Hz)",
                super::format_number(cfg.drive_mcq)
            ));
            for ((c, _), r) in pts.iter().zip(rows) {
                d.rows.push(vec![c[0], r[0], r[1]]);
            }
            out.push(d);
        }
        FigureId::Sm3c => {
            let p = base.params;
            let r = leakage_study(&p, p.duffing, &times(&ax[0]), &opts(cfg)?)?;
            let mut d = Dataset::new(
                id.name(),
                &["time", "p_leak_mq", "p_leak_mcq", "mq_p0", "mq_p1", "mq_p2", "mcq_p0", "mcq_p1", "mcq_p2"],
            );
            d.comments.push(format!("drive omega_d = D, alpha = {}", super::format_number(p.alpha())));
            for (k, t) in r.times.iter().enumerate() {
                let pm = r.populations_mq.row(k);
                let pc = r.populations_mcq.row(k);
                d.rows.push(vec![*t, r.p_leak_mq[k], r.p_leak_mcq[k], pm[0], pm[1], pm[2], pc[0], pc[1], pc[2]]);
            }
            out.push(d);
        }
        FigureId::Sm3d => {
            let p = base.params;
            let t = times(&ax[0]);
            let o = opts(cfg)?;
            let a1 = phase_flip_study(&p, &t, QubitKind::Mq, &o)?;
            let a2 = phase_flip_study(&p, &t, QubitKind::Mcq, &o)?;
            let mut d = Dataset::new(id.name(), &["time", "a1", "a2"]);
            d.comments.push(format!(
                "alpha = {}, Q = {}",
                super::format_number(p.alpha()),
                super::format_number(p.quality_factor)
            ));
            for (k, tk) in t.iter().enumerate() {
                d.rows.push(vec![*tk, a1.probability[k], a2.probability[k]]);
            }
            out.push(d);
        }
        FigureId::Sm4 => {
            let p = base.mcq()?;
            let cmp = effective_vs_full(&p, &times(&ax[0]), &opts(cfg)?)?;
            let mut d = Dataset::new(id.name(), &["time", "c_plus_full", "c_plus_effective"]);
            d.comments.push(format!(
                "Omega2 = {} omega, max deviation {}",
                super::format_number(cfg.drive_mcq),
                super::format_number(cmp.max_deviation)
            ));
            for k in 0..cmp.times.len() {
                d.rows.push(vec![cmp.times[k], cmp.full[k], cmp.effective[k]]);
            }
            out.push(d);
        }
        FigureId::Sm6 => {
            let pts = grid_points(cfg, &ax);
            let regime = cfg.gas_regime();
            let rows = par_map(&pts, |p| {
                let g = gas_damping(&p.params, &p.gas()?, regime)?;
                Ok([g.kappa / (2.0 * PI), p.params.omega / g.kappa, g.knudsen.unwrap_or(f64::NAN)])
            })?;
            let mut d = Dataset::new(id.name(), &["pressure", "kappa_gas_hz", "quality_factor", "knudsen"]);
            d.comments.push("kappa_gas_hz = kappa_gas/(2 pi)".into());
            for ((c, _), r) in pts.iter().zip(rows) {
                d.rows.push(vec![c[0], r[0], r[1], r[2]]);
            }
            out.push(d);
        }
    }
    for d in &mut out {
        d.comments.insert(0, format!("catgrav {} {}", super::VERSION, id));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick(id: FigureId) -> ExperimentConfig {
        let mut cfg = default_config(id);
        for a in &mut cfg.sweeps {
            a.points = a.points.min(5);
        }
        cfg
    }

    #[test]
    fn names_round_trip() {
        for id in FigureId::ALL {
            assert_eq!(id.name().parse::<FigureId>().unwrap(), id);
        }
        assert!("fig9".parse::<FigureId>().is_err());
    }

    #[test]
    fn qfi_curves_have_unit_mass_slope() {
        for id in [FigureId::Fig2a, FigureId::Fig4a] {
            let out = run_figure(id, &quick(id)).unwrap();
            assert_eq!(out.datasets.len(), 3);
            for d in &out.datasets {
                let m = d.column("mass").unwrap();
                let f = d.column("qfi_sld").unwrap();
                let slope = (f[4] / f[0]).ln() / (m[4] / m[0]).ln();
                assert!((slope - 1.0).abs() < 1e-2, "{id}: {slope}");
            }
        }
    }

    #[test]
    fn missing_axis_is_named() {
        let cfg = ExperimentConfig::default();
        match run_figure(FigureId::Fig2b, &cfg) {
            Err(Error::Context { source, .. }) => assert!(matches!(*source, Error::MissingField(_))),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn cheap_figures_are_deterministic() {
        for id in [FigureId::Fig2b, FigureId::Fig4c, FigureId::Fig4d, FigureId::Sm1, FigureId::Sm5a, FigureId::Sm6] {
            let cfg = quick(id);
            let a = run_figure(id, &cfg).unwrap();
            let b = run_figure(id, &cfg).unwrap();
            for (x, y) in a.datasets.iter().zip(&b.datasets) {
                assert_eq!(x.to_csv(), y.to_csv());
            }
            assert_eq!(a.metadata, b.metadata);
        }
    }
}
