//! Figure datasets, the sensitivity comparison table and parameter sweeps.
//!
//! Everything here is deterministic: sweep points run in parallel on the
//! rayon pool but are assembled in grid order, and numbers are written in
//! their shortest round-trip form, so identical configs give identical bytes.

mod figures;
mod selftest;
mod table;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::baselines::{s_scala, s_wang, BaselineParams};
use crate::config::{ExperimentConfig, Quantity, SweepAxis, SweepVariable};
use crate::constants::MICRO_GAL;
use crate::dynamics::IntegratorOptions;
use crate::environment::{damping_report, gas_damping, DampingReport, GasParams};
use crate::metrology::{
    mcq_dissipative_optimal, mcq_ideal_optimal, mq_ideal_optimal, qfi_mcq_closed, qfi_mq_closed,
    sensitivity_mcq_closed, sensitivity_mcq_numeric, sensitivity_mq_closed,
};
use crate::model::{JumpModel, MechanicalParams};
use crate::{Error, Result};

pub use figures::{default_config, run_figure, FigureId};
pub use selftest::{selftest, Check};
pub use table::{run_table1, Table1, TableRow};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// One CSV file: a header row and numeric rows, preceded by `#` comments.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Dataset {
    pub name: String,
    pub comments: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Dataset {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            comments: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            let _ = writeln!(out, "# {c}");
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|x| format_number(*x)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// Shortest decimal that parses back to the same `f64`.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else {
        format!("{x:e}")
    }
}

/// Datasets of one run plus the metadata needed to repeat it.
#[derive(Clone, Debug, Serialize)]
pub struct Output {
    pub name: String,
    pub datasets: Vec<Dataset>,
    pub metadata: serde_json::Value,
}

impl Output {
    /// Writes `<dataset>.csv` per dataset and `<name>.json` with the metadata.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        for d in &self.datasets {
            let path = dir.join(format!("{}.csv", d.name));
            fs::write(&path, d.to_csv())?;
            written.push(path);
        }
        let path = dir.join(format!("{}.json", self.name));
        let mut text = serde_json::to_string_pretty(&self.metadata)?;
        text.push('\n');
        fs::write(&path, text)?;
        written.push(path);
        Ok(written)
    }
}

/// Sets the size of the global rayon pool. Only the first call has effect.
pub fn set_jobs(jobs: usize) -> Result<()> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build_global()
        .map_err(|e| Error::Config(format!("cannot configure {jobs} worker threads: {e}")))
}

/// Parameters at one grid point of a sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub params: MechanicalParams,
    pub drive_mq: f64,
    pub drive_mcq: f64,
    pub gas: Option<GasParams>,
    pub time: Option<f64>,
}

impl Point {
    pub fn from_config(cfg: &ExperimentConfig) -> Self {
        Self { params: cfg.params, drive_mq: cfg.drive_mq, drive_mcq: cfg.drive_mcq, gas: cfg.gas, time: None }
    }

    /// Moves one coordinate. Changing the mass keeps the residual
    /// acceleration `g − F/m`; changing `ω` keeps `D/ω` and `P/ω`.
    pub fn set(&mut self, variable: SweepVariable, value: f64) {
        let p = &mut self.params;
        match variable {
            SweepVariable::Mass => {
                p.counter_force *= value / p.mass;
                p.mass = value;
            }
            SweepVariable::Omega => {
                let r = value / p.omega;
                p.duffing *= r;
                p.pump *= r;
                p.omega = value;
            }
            SweepVariable::Duffing => p.duffing = value,
            SweepVariable::Pump => p.pump = value,
            SweepVariable::Temperature => p.temperature = value,
            SweepVariable::QualityFactor => p.quality_factor = value,
            SweepVariable::Alpha => *p = p.with_alpha(value),
            SweepVariable::DriveMq => self.drive_mq = value,
            SweepVariable::DriveMcq => self.drive_mcq = value,
            SweepVariable::GasPressure => {
                let t = p.temperature;
                self.gas = Some(GasParams { pressure: value, ..self.gas.unwrap_or(GasParams::nitrogen(value, t)) });
            }
            SweepVariable::Time => self.time = Some(value),
        }
    }

    /// Parameters with the MQ drive `Ω₁ = drive_mq·ω` applied.
    pub fn mq(&self) -> MechanicalParams {
        self.params.with_mq_rabi(self.drive_mq * self.params.omega)
    }

    /// Parameters with the MCQ drive `Ω₂ = drive_mcq·ω` applied.
    pub fn mcq(&self) -> Result<MechanicalParams> {
        self.params.with_mcq_rabi(self.drive_mcq * self.params.omega)
    }

    pub fn gas(&self) -> Result<GasParams> {
        self.gas.ok_or_else(|| Error::MissingField("gas_pressure".into()))
    }
}

/// Cartesian product of the axes in row-major order (first axis slowest).
pub fn grid_points(cfg: &ExperimentConfig, axes: &[SweepAxis]) -> Vec<(Vec<f64>, Point)> {
    let mut out = vec![(Vec::new(), Point::from_config(cfg))];
    for axis in axes {
        let values = axis.values();
        out = out
            .into_iter()
            .flat_map(|(coords, point)| {
                values.iter().map(move |&v| {
                    let mut p = point;
                    p.set(axis.variable, v);
                    let mut c = coords.clone();
                    c.push(v);
                    (c, p)
                })
            })
            .collect();
    }
    out
}

/// Evaluates `f` at every point in parallel; results keep grid order.
pub(crate) fn par_map<T, F>(points: &[(Vec<f64>, Point)], f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&Point) -> Result<T> + Sync + Send,
{
    points.par_iter().map(|(_, p)| f(p)).collect()
}

/// Value of a sweep quantity at a point. Sensitivities are in µGal/√Hz,
/// QFIs in s⁴/m², damping rates in Hz (κ/2π). Without a time coordinate
/// each scheme is evaluated at its optimal sensing time.
pub fn evaluate(quantity: Quantity, point: &Point, baseline: &BaselineParams) -> Result<f64> {
    let p = &point.params;
    let t1 = point.time.unwrap_or(std::f64::consts::PI / p.omega);
    let t2 = point.time.unwrap_or(std::f64::consts::PI / (2.0 * p.omega));
    let value = match quantity {
        Quantity::S1 => match point.time {
            Some(t) => sensitivity_mq_closed(&point.mq(), t, false)?.micro_gal(),
            None => mq_ideal_optimal(p) / MICRO_GAL,
        },
        Quantity::S1Diss => sensitivity_mq_closed(&point.mq(), t1, true)?.micro_gal(),
        Quantity::S2 => match point.time {
            Some(t) => sensitivity_mcq_closed(&point.mcq()?, t, false)?.micro_gal(),
            None => mcq_ideal_optimal(p) / MICRO_GAL,
        },
        Quantity::S2Diss => match point.time {
            Some(t) => sensitivity_mcq_closed(&point.mcq()?, t, true)?.micro_gal(),
            None => mcq_dissipative_optimal(p) / MICRO_GAL,
        },
        Quantity::S2Num => {
            let q = point.mcq()?;
            let jumps = JumpModel::default_for(q.alpha().powi(2));
            sensitivity_mcq_numeric(&q, t2, jumps, &IntegratorOptions::new(1e-12)?)?.micro_gal()
        }
        Quantity::Qfi1 => qfi_mq_closed(&point.mq(), t1)?.value,
        Quantity::Qfi2 => qfi_mcq_closed(p, t2)?.value,
        Quantity::SScala => s_scala(p.omega, baseline)? / MICRO_GAL,
        Quantity::SWang => s_wang(p.omega, baseline)? / MICRO_GAL,
        Quantity::KappaGas => {
            gas_damping(p, &point.gas()?, crate::environment::GasRegime::HighVacuum)?.kappa
                / (2.0 * std::f64::consts::PI)
        }
        Quantity::QualityFactor => {
            damping_report(p, &point.gas()?, crate::environment::GasRegime::HighVacuum)?.quality_factor
        }
    };
    Ok(value)
}

/// Evaluates the configured quantity over the configured axes.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Output> {
    let quantity = cfg.quantity.ok_or_else(|| Error::MissingField("sweep_quantity".into()))?;
    if cfg.sweeps.is_empty() {
        return Err(Error::MissingField("sweep_variable".into()));
    }
    let baseline = cfg.baseline_or_reference()?;
    let points = grid_points(cfg, &cfg.sweeps);
    let values = par_map(&points, |p| {
        let mut point = *p;
        if point.gas.is_some() || matches!(quantity, Quantity::KappaGas | Quantity::QualityFactor) {
            point.gas = Some(point.gas()?);
        }
        evaluate(quantity, &point, &baseline)
    })
    .map_err(|e| e.context(format!("sweep of {}", quantity.name())))?;
    let mut columns: Vec<&str> = cfg.sweeps.iter().map(|a| a.variable.name()).collect();
    columns.push(quantity.name());
    let mut d = Dataset::new(format!("sweep_{}", quantity.name()), &columns);
    d.comments.push(format!("catgrav {VERSION} sweep"));
    for ((coords, _), v) in points.into_iter().zip(values) {
        let mut row = coords;
        row.push(v);
        d.rows.push(row);
    }
    let datasets = vec![d];
    let metadata = metadata("sweep", cfg, &datasets)?;
    Ok(Output { name: datasets[0].name.clone(), datasets, metadata })
}

/// Damping budget for the configured particle and gas.
pub fn run_damping(cfg: &ExperimentConfig) -> Result<DampingReport> {
    let gas = cfg.gas.ok_or_else(|| Error::MissingField("gas_pressure".into()))?;
    damping_report(&cfg.params, &gas, cfg.gas_regime())
}

/// Metadata common to every output: software version, the full config and
/// its flat-text form.
pub(crate) fn metadata(kind: &str, cfg: &ExperimentConfig, datasets: &[Dataset]) -> Result<serde_json::Value> {
    let files: Vec<serde_json::Value> = datasets
        .iter()
        .map(|d| serde_json::json!({ "file": format!("{}.csv", d.name), "columns": d.columns, "rows": d.rows.len() }))
        .collect();
    Ok(serde_json::json!({
        "output": kind,
        "software": format!("catgrav {VERSION}"),
        "config": serde_json::to_value(cfg)?,
        "config_toml": cfg.to_toml_string(),
        "derivative_step_rule": "dg = max(1e-6*|g - F/m|, 1e-10) m/s^2, validated by halving to 1%",
        "datasets": files,
    }))
}
