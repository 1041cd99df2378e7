use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::Serialize;

use super::{metadata, Point};
use crate::baselines::{s_scala, s_wang};
use crate::config::ExperimentConfig;
use crate::constants::MICRO_GAL;
use crate::metrology::{mq_ideal_optimal, sensitivity_mcq_closed, sensitivity_mq_closed, Provenance};
use crate::Result;

/// One row of the sensitivity comparison. Frequencies are in Hz (`ω/2π`).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TableRow {
    pub scheme: String,
    pub frequency: f64,
    pub mass: Option<f64>,
    pub duffing: Option<f64>,
    pub pump: Option<f64>,
    pub sensing_time: f64,
    pub sensitivity: f64,
    pub provenance: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Table1 {
    pub rows: Vec<TableRow>,
    pub text: String,
    pub metadata: serde_json::Value,
}

impl Table1 {
    pub fn row(&self, scheme: &str) -> Option<&TableRow> {
        self.rows.iter().find(|r| r.scheme == scheme)
    }
}

fn provenance(p: Provenance) -> String {
    match p {
        Provenance::Analytic => "analytic",
        Provenance::Numeric => "numeric",
    }
    .into()
}

/// The six-row sensitivity comparison: two calibrated reference schemes,
/// then the ideal and thermal MQ and MCQ sensitivities at their optimal
/// sensing times.
pub fn run_table1(cfg: &ExperimentConfig) -> Result<Table1> {
    let point = Point::from_config(cfg);
    let p = cfg.params;
    let bp = cfg.baseline_or_reference()?;
    let hz = |w: f64| w / (2.0 * PI);
    let f = hz(p.omega);
    let t1 = PI / p.omega;
    let t2 = PI / (2.0 * p.omega);
    let mq = point.mq();
    let mcq = point.mcq()?;
    let s1_diss = sensitivity_mq_closed(&mq, t1, true)?;
    let s2 = sensitivity_mcq_closed(&mcq, t2, false)?;
    let s2_diss = sensitivity_mcq_closed(&mcq, t2, true)?;
    let reference = |scheme: &str, t: f64, s: f64| TableRow {
        scheme: scheme.into(),
        frequency: f,
        mass: None,
        duffing: None,
        pump: None,
        sensing_time: t,
        sensitivity: s / MICRO_GAL,
        provenance: "calibrated".into(),
    };
    let ours = |scheme: &str, pump: bool, t: f64, s: f64, prov: String| TableRow {
        scheme: scheme.into(),
        frequency: f,
        mass: Some(p.mass),
        duffing: Some(hz(p.duffing)),
        pump: pump.then(|| hz(p.pump)),
        sensing_time: t,
        sensitivity: s / MICRO_GAL,
        provenance: prov,
    };
    let rows = vec![
        reference("S_S", bp.t_s, s_scala(p.omega, &bp)?),
        reference("S_W", 2.0 * bp.t_w, s_wang(p.omega, &bp)?),
        ours("S_1", false, t1, mq_ideal_optimal(&p), "analytic".into()),
        ours("S_1^diss", false, t1, s1_diss.value, provenance(s1_diss.provenance)),
        ours("S_2", true, t2, s2.value, provenance(s2.provenance)),
        ours("S_2^diss", true, t2, s2_diss.value, provenance(s2_diss.provenance)),
    ];
    let text = render(&rows);
    let metadata = metadata("table1", cfg, &[])?;
    Ok(Table1 { rows, text, metadata })
}

fn cell(x: Option<f64>, scale: f64, unit: &str) -> String {
    x.map_or("-".into(), |v| format!("{:.4} {unit}", v * scale))
}

fn render(rows: &[TableRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<10} {:>12} {:>14} {:>12} {:>12} {:>12} {:>14}  provenance",
        "scheme", "omega/2pi", "m", "D/2pi", "P/2pi", "t", "S [uGal/rtHz]"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{:<10} {:>12} {:>14} {:>12} {:>12} {:>12} {:>14.4}  {}",
            r.scheme,
            format!("{:.4} kHz", r.frequency * 1e-3),
            r.mass.map_or("-".into(), |m| format!("{m:.3e} kg")),
            cell(r.duffing, 1e-3, "kHz"),
            cell(r.pump, 1e-3, "kHz"),
            format!("{:.4} ms", r.sensing_time * 1e3),
            r.sensitivity,
            r.provenance
        );
    }
    out
}
