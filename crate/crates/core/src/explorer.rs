//! Joint electrical/structural evaluation over parameter grids, stability
//! constraints and the Pareto front.

use serde::Serialize;

use crate::em::{self, EmSettings};
use crate::error::{Error, Result};
use crate::exec::{map_ordered, Exec};
use crate::geometry::{validate_spec, DielectricMode, SpiralSpec, XBeamSpec};
use crate::mech::{self, MechSettings};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstraintSet {
    /// m; `None` means `min(spacing, airgap_height)/2` of each design.
    pub max_shock_deflection: Option<f64>,
    /// Hz
    pub min_resonant_frequency: f64,
    pub min_q: Option<f64>,
    /// H
    pub min_inductance: Option<f64>,
}

impl Default for ConstraintSet {
    fn default() -> Self {
        ConstraintSet {
            max_shock_deflection: None,
            min_resonant_frequency: 1e3,
            min_q: None,
            min_inductance: None,
        }
    }
}

impl ConstraintSet {
    pub fn check(&self) -> Result<()> {
        let bad = |name: &str, v: f64| -> Result<()> {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Config(format!("constraint {name} must be > 0, got {v}")))
            }
        };
        if let Some(v) = self.max_shock_deflection {
            bad("max_shock_deflection", v)?;
        }
        bad("min_resonant_frequency", self.min_resonant_frequency)?;
        if let Some(v) = self.min_q {
            bad("min_q", v)?;
        }
        if let Some(v) = self.min_inductance {
            bad("min_inductance", v)?;
        }
        Ok(())
    }

    pub fn shock_budget(&self, spec: &SpiralSpec) -> f64 {
        self.max_shock_deflection
            .unwrap_or(0.5 * spec.spacing.min(spec.airgap_height))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct EvalSettings {
    pub em: EmSettings,
    pub mech: MechSettings,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointMetrics {
    pub l_total: f64,
    pub q_max: f64,
    pub f_peak: f64,
    pub kappa_outer: f64,
    pub f_max_impact: f64,
    pub f_resonant: f64,
    pub shock_deflection: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignPoint {
    /// Position in the sweep grid, one index per grid axis.
    pub grid_index: Vec<usize>,
    pub spec: SpiralSpec,
    pub metrics: Option<PointMetrics>,
    pub feasible: bool,
    pub violations: Vec<String>,
    pub error: Option<String>,
}

fn compute_metrics(spec: &SpiralSpec, settings: &EvalSettings, exec: Exec) -> Result<PointMetrics> {
    let violations = validate_spec(spec);
    if !violations.is_empty() {
        return Err(Error::InvalidSpec(violations));
    }
    let electrical = em::analyze(spec, &settings.em, exec)?;
    let impact = mech::impact_force(spec, spec.xbeam.is_some(), &settings.mech, exec)?;
    let (outer, _) = mech::strip_estimates(spec, settings.mech.shock_accel);
    Ok(PointMetrics {
        l_total: electrical.l_total(),
        q_max: electrical.curve.q_max,
        f_peak: electrical.curve.f_peak,
        kappa_outer: outer.kappa,
        f_max_impact: impact.force,
        f_resonant: outer.f_resonant,
        shock_deflection: outer.shock_deflection,
    })
}

/// Runs both pipelines on one design and checks it against the
/// constraints. Failures are recorded on the point, never propagated.
pub fn evaluate(spec: &SpiralSpec, constraints: &ConstraintSet, settings: &EvalSettings, exec: Exec) -> DesignPoint {
    let mut point = DesignPoint {
        grid_index: Vec::new(),
        spec: spec.clone(),
        metrics: None,
        feasible: false,
        violations: Vec::new(),
        error: None,
    };
    match compute_metrics(spec, settings, exec) {
        Ok(m) => {
            let budget = constraints.shock_budget(spec);
            if !(m.shock_deflection <= budget) {
                point.violations.push(format!(
                    "shock_deflection {:.3e} m exceeds {:.3e} m",
                    m.shock_deflection, budget
                ));
            }
            if !(m.f_resonant >= constraints.min_resonant_frequency) {
                point.violations.push(format!(
                    "f_resonant {:.3e} Hz below {:.3e} Hz",
                    m.f_resonant, constraints.min_resonant_frequency
                ));
            }
            if let Some(q) = constraints.min_q.filter(|&q| !(m.q_max >= q)) {
                point.violations.push(format!("q_max {:.3e} below {:.3e}", m.q_max, q));
            }
            if let Some(l) = constraints.min_inductance.filter(|&l| !(m.l_total >= l)) {
                point.violations.push(format!("l_total {:.3e} H below {:.3e} H", m.l_total, l));
            }
            point.feasible = point.violations.is_empty();
            point.metrics = Some(m);
        }
        Err(e) => point.error = Some(e.to_string()),
    }
    point
}

/// Value lists per parameter; an empty list keeps the base value. Axes are
/// enumerated in the field order below, the last one varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignGrid {
    pub base: SpiralSpec,
    pub inner_diameter: Vec<f64>,
    pub trace_width: Vec<f64>,
    pub spacing: Vec<f64>,
    pub turns: Vec<u32>,
    pub metal_thickness: Vec<f64>,
    pub airgap_height: Vec<f64>,
    pub lead_gap: Vec<f64>,
    pub dielectric_mode: Vec<DielectricMode>,
    pub xbeam: Vec<bool>,
}

pub const GRID_KEYS: [&str; 9] = [
    "inner_diameter",
    "trace_width",
    "spacing",
    "turns",
    "metal_thickness",
    "airgap_height",
    "lead_gap",
    "dielectric_mode",
    "xbeam",
];

impl DesignGrid {
    pub fn new(base: SpiralSpec) -> Self {
        DesignGrid {
            base,
            inner_diameter: vec![],
            trace_width: vec![],
            spacing: vec![],
            turns: vec![],
            metal_thickness: vec![],
            airgap_height: vec![],
            lead_gap: vec![],
            dielectric_mode: vec![],
            xbeam: vec![],
        }
    }

    fn axis_lengths(&self) -> [usize; 9] {
        [
            self.inner_diameter.len(),
            self.trace_width.len(),
            self.spacing.len(),
            self.turns.len(),
            self.metal_thickness.len(),
            self.airgap_height.len(),
            self.lead_gap.len(),
            self.dielectric_mode.len(),
            self.xbeam.len(),
        ]
        .map(|n| n.max(1))
    }

    pub fn len(&self) -> usize {
        self.axis_lengths().iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn spec_at(&self, idx: &[usize; 9]) -> SpiralSpec {
        fn pick<T: Clone>(v: &[T], i: usize, base: T) -> T {
            v.get(i).cloned().unwrap_or(base)
        }
        let b = &self.base;
        let with_xbeam = pick(&self.xbeam, idx[8], b.xbeam.is_some());
        SpiralSpec {
            inner_diameter: pick(&self.inner_diameter, idx[0], b.inner_diameter),
            trace_width: pick(&self.trace_width, idx[1], b.trace_width),
            spacing: pick(&self.spacing, idx[2], b.spacing),
            turns: pick(&self.turns, idx[3], b.turns),
            metal_thickness: pick(&self.metal_thickness, idx[4], b.metal_thickness),
            airgap_height: pick(&self.airgap_height, idx[5], b.airgap_height),
            lead_gap: pick(&self.lead_gap, idx[6], b.lead_gap),
            dielectric_mode: pick(&self.dielectric_mode, idx[7], b.dielectric_mode),
            xbeam: with_xbeam.then(|| b.xbeam.clone().unwrap_or_else(XBeamSpec::standard)),
            ..b.clone()
        }
    }

    /// Every grid point in lexicographic index order.
    pub fn points(&self) -> Vec<(Vec<usize>, SpiralSpec)> {
        let lens = self.axis_lengths();
        let mut idx = [0usize; 9];
        let mut out = Vec::with_capacity(self.len());
        loop {
            out.push((idx.to_vec(), self.spec_at(&idx)));
            let mut k = 9;
            loop {
                if k == 0 {
                    return out;
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < lens[k] {
                    break;
                }
                idx[k] = 0;
            }
        }
    }
}

/// Evaluates the whole grid. The result order is the grid order whatever
/// the execution mode.
pub fn sweep(grid: &DesignGrid, constraints: &ConstraintSet, settings: &EvalSettings, exec: Exec) -> Vec<DesignPoint> {
    let points = grid.points();
    map_ordered(exec, &points, |(idx, spec)| {
        let mut p = evaluate(spec, constraints, settings, Exec::Sequential);
        p.grid_index = idx.clone();
        p
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    QMax,
    FMaxImpact,
    FPeak,
    LTotal,
}

impl Objective {
    pub const DEFAULT: [Objective; 2] = [Objective::QMax, Objective::FMaxImpact];

    pub fn value(self, m: &PointMetrics) -> f64 {
        match self {
            Objective::QMax => m.q_max,
            Objective::FMaxImpact => m.f_max_impact,
            Objective::FPeak => m.f_peak,
            Objective::LTotal => m.l_total,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Objective::QMax => "q_max",
            Objective::FMaxImpact => "f_max_impact",
            Objective::FPeak => "f_peak",
            Objective::LTotal => "l_total",
        }
    }
}

impl std::str::FromStr for Objective {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "q_max" => Ok(Objective::QMax),
            "f_max_impact" => Ok(Objective::FMaxImpact),
            "f_peak" => Ok(Objective::FPeak),
            "l_total" => Ok(Objective::LTotal),
            other => Err(Error::Config(format!(
                "unknown objective '{other}' (q_max, f_max_impact, f_peak, l_total)"
            ))),
        }
    }
}

/// `a` dominates `b`: no worse anywhere, strictly better somewhere (all
/// objectives maximized).
pub fn dominates(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x >= y) && a.iter().zip(b).any(|(x, y)| x > y)
}

/// Indices of the non-dominated vectors, ordered by the first objective
/// descending, ties by input position. Equal vectors are all kept.
///
/// After a lexicographic descending sort a vector can only be dominated by
/// one that precedes it, and by transitivity checking against the front
/// built so far is enough.
pub fn pareto_indices(values: &[Vec<f64>]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| {
        values[b]
            .iter()
            .zip(&values[a])
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let mut front: Vec<usize> = Vec::new();
    for i in order {
        if !front.iter().any(|&j| dominates(&values[j], &values[i])) {
            front.push(i);
        }
    }
    front.sort_by(|&a, &b| values[b][0].total_cmp(&values[a][0]).then(a.cmp(&b)));
    front
}

/// Feasible, successfully evaluated points that no other such point
/// dominates. Returns indices into `points`.
pub fn pareto_front(points: &[DesignPoint], objectives: &[Objective]) -> Vec<usize> {
    let candidates: Vec<usize> = points
        .iter()
        .enumerate()
        .filter(|(_, p)| p.feasible && p.metrics.is_some())
        .map(|(i, _)| i)
        .collect();
    if candidates.is_empty() {
        log::warn!("no feasible design points; Pareto front is empty");
        return Vec::new();
    }
    let values: Vec<Vec<f64>> = candidates
        .iter()
        .map(|&i| {
            let m = points[i].metrics.as_ref().unwrap();
            objectives.iter().map(|o| o.value(m)).collect()
        })
        .collect();
    pareto_indices(&values).into_iter().map(|k| candidates[k]).collect()
}
