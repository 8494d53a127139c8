//! Report writers. Every float goes out in scientific notation with nine
//! significant digits so reports diff cleanly across runs and machines.

use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::deembed::SpotInductance;
use crate::em::{PiModel, QCurve};
use crate::error::{Error, Result};
use crate::explorer::{ConstraintSet, DesignPoint, Objective, PointMetrics};
use crate::geometry::SpiralSpec;

pub fn sci(v: f64) -> String {
    format!("{v:.8e}")
}

/// Pretty JSON with `{:.8e}` floats.
struct SciFormatter<'a>(PrettyFormatter<'a>);

impl Formatter for SciFormatter<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        write!(w, "{v:.8e}")
    }
    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        write!(w, "{:.8e}", v as f64)
    }
    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SciFormatter(PrettyFormatter::new()));
    value
        .serialize(&mut ser)
        .map_err(|e| Error::Config(format!("JSON encoding: {e}")))?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

/// Spec echo in config units (µm).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpecEcho {
    pub inner_diameter_um: f64,
    pub trace_width_um: f64,
    pub spacing_um: f64,
    pub turns: u32,
    pub metal_thickness_um: f64,
    pub airgap_height_um: f64,
    pub lead_gap_um: f64,
    pub dielectric_mode: String,
    pub conductor: String,
    pub xbeam: bool,
    pub oxide_rel_permittivity: f64,
}

impl From<&SpiralSpec> for SpecEcho {
    fn from(s: &SpiralSpec) -> Self {
        SpecEcho {
            inner_diameter_um: s.inner_diameter * 1e6,
            trace_width_um: s.trace_width * 1e6,
            spacing_um: s.spacing * 1e6,
            turns: s.turns,
            metal_thickness_um: s.metal_thickness * 1e6,
            airgap_height_um: s.airgap_height * 1e6,
            lead_gap_um: s.lead_gap * 1e6,
            dielectric_mode: s.dielectric_mode.to_string(),
            conductor: s.conductor.name.clone(),
            xbeam: s.xbeam.is_some(),
            oxide_rel_permittivity: s.oxide_rel_permittivity,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ElectricalSummary {
    pub spec: SpecEcho,
    pub l_total: f64,
    pub q_max: f64,
    pub f_peak: f64,
    pub spot: Option<SpotInductance>,
    pub pi_model: PiModel,
}

fn csv_err(e: impl std::fmt::Display) -> Error {
    Error::Config(format!("CSV encoding: {e}"))
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(csv_err)?;
    Ok(String::from_utf8(bytes).expect("CSV fields are UTF-8"))
}

/// `freq_hz,q,l_eff_h`
pub fn qcurve_csv(curve: &QCurve) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["freq_hz", "q", "l_eff_h"]).map_err(csv_err)?;
    for ((f, q), l) in curve.frequencies.iter().zip(&curve.q_values).zip(&curve.l_eff) {
        w.write_record([sci(*f), sci(*q), sci(*l)]).map_err(csv_err)?;
    }
    finish(w)
}

const METRIC_COLUMNS: [&str; 7] = [
    "l_total_h",
    "q_max",
    "f_peak_hz",
    "kappa_outer_n_per_m",
    "f_max_impact_n",
    "f_resonant_hz",
    "shock_deflection_m",
];

fn metric_fields(m: Option<&PointMetrics>) -> Vec<String> {
    match m {
        Some(m) => [
            m.l_total,
            m.q_max,
            m.f_peak,
            m.kappa_outer,
            m.f_max_impact,
            m.f_resonant,
            m.shock_deflection,
        ]
        .iter()
        .map(|v| sci(*v))
        .collect(),
        None => vec![String::new(); METRIC_COLUMNS.len()],
    }
}

/// One row per design point: spec fields, metrics, feasibility and causes.
pub fn sweep_csv(points: &[DesignPoint]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec![
        "point",
        "inner_diameter_um",
        "trace_width_um",
        "spacing_um",
        "turns",
        "metal_thickness_um",
        "airgap_height_um",
        "lead_gap_um",
        "dielectric_mode",
        "xbeam",
    ];
    header.extend(METRIC_COLUMNS);
    header.extend(["feasible", "violations", "error"]);
    w.write_record(&header).map_err(csv_err)?;
    for (i, p) in points.iter().enumerate() {
        let s = SpecEcho::from(&p.spec);
        let mut row = vec![
            i.to_string(),
            sci(s.inner_diameter_um),
            sci(s.trace_width_um),
            sci(s.spacing_um),
            s.turns.to_string(),
            sci(s.metal_thickness_um),
            sci(s.airgap_height_um),
            sci(s.lead_gap_um),
            s.dielectric_mode,
            s.xbeam.to_string(),
        ];
        row.extend(metric_fields(p.metrics.as_ref()));
        row.push(p.feasible.to_string());
        row.push(p.violations.join("; "));
        row.push(p.error.clone().unwrap_or_default());
        w.write_record(&row).map_err(csv_err)?;
    }
    finish(w)
}

#[derive(Debug, Serialize)]
struct FrontMember<'a> {
    point: usize,
    grid_index: &'a [usize],
    spec: SpecEcho,
    metrics: &'a PointMetrics,
}

#[derive(Debug, Serialize)]
struct FailedPoint<'a> {
    point: usize,
    error: &'a str,
}

#[derive(Debug, Serialize)]
struct SweepSummary<'a> {
    constraints: &'a ConstraintSet,
    objectives: Vec<&'static str>,
    evaluated: usize,
    feasible: usize,
    failed: Vec<FailedPoint<'a>>,
    front: Vec<FrontMember<'a>>,
}

pub fn sweep_json(
    points: &[DesignPoint],
    front: &[usize],
    constraints: &ConstraintSet,
    objectives: &[Objective],
) -> Result<String> {
    let summary = SweepSummary {
        constraints,
        objectives: objectives.iter().map(|o| o.name()).collect(),
        evaluated: points.len(),
        feasible: points.iter().filter(|p| p.feasible).count(),
        failed: points
            .iter()
            .enumerate()
            .filter_map(|(i, p)| p.error.as_deref().map(|e| FailedPoint { point: i, error: e }))
            .collect(),
        front: front
            .iter()
            .map(|&i| FrontMember {
                point: i,
                grid_index: &points[i].grid_index,
                spec: SpecEcho::from(&points[i].spec),
                metrics: points[i].metrics.as_ref().expect("front members carry metrics"),
            })
            .collect(),
    };
    to_json(&summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_have_nine_significant_digits() {
        #[derive(Serialize)]
        struct T {
            a: f64,
            b: Vec<f64>,
            c: Option<f64>,
            n: u32,
        }
        let s = to_json(&T {
            a: 1.0 / 3.0,
            b: vec![2.5e-9],
            c: None,
            n: 4,
        })
        .unwrap();
        assert!(s.contains("\"a\": 3.33333333e-1"), "{s}");
        assert!(s.contains("2.50000000e-9"));
        assert!(s.contains("\"c\": null"));
        assert!(s.contains("\"n\": 4"));
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["b"][0].as_f64(), Some(2.5e-9));
    }

    #[test]
    fn qcurve_csv_layout() {
        let c = QCurve {
            frequencies: vec![1e9, 2e9],
            q_values: vec![1.0, 2.0],
            l_eff: vec![1e-9, 1.1e-9],
            q_max: 2.0,
            f_peak: 2e9,
            skipped: vec![],
        };
        let s = qcurve_csv(&c).unwrap();
        assert_eq!(
            s,
            "freq_hz,q,l_eff_h\n1.00000000e9,1.00000000e0,1.00000000e-9\n2.00000000e9,2.00000000e0,1.10000000e-9\n"
        );
    }
}
