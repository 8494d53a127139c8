//! Structural model: closed-form strip estimates and a 3D frame FEM.

pub mod analytic;
pub mod frame;
pub mod impact;
pub mod section;
pub mod solver;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::geometry::{generate_layout, SpiralSpec, XBeamSpec};

pub use analytic::{cantilever_stiffness, resonant_frequency, shock_deflection, G_ACCEL};
pub use frame::{build_frame, Element, ElementKind, FrameModel};
pub use impact::{max_impact_force, ImpactResult};
pub use section::{BeamSection, SectionStiffness};
pub use solver::{assemble_dense, solve_static, FactoredFrame, StaticSolution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum XBeamMode {
    Off,
    On,
    #[default]
    Both,
}

impl std::str::FromStr for XBeamMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "off" => Ok(XBeamMode::Off),
            "on" => Ok(XBeamMode::On),
            "both" => Ok(XBeamMode::Both),
            other => Err(Error::Config(format!("xbeam must be on, off or both, got '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MechSettings {
    pub elements_per_segment: usize,
    /// m
    pub deflection_limit: f64,
    /// m/s²
    pub shock_accel: f64,
}

impl Default for MechSettings {
    fn default() -> Self {
        MechSettings {
            elements_per_segment: 4,
            deflection_limit: 1e-6,
            shock_accel: 20.0 * G_ACCEL,
        }
    }
}

/// One winding side treated as a cantilever. The free span is the
/// centerline side length minus one trace width (the corner overlap).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StripEstimate {
    pub span: f64,
    pub mass: f64,
    pub kappa: f64,
    pub shock_deflection: f64,
    pub f_resonant: f64,
}

pub fn strip_estimate(spec: &SpiralSpec, side: f64, shock_accel: f64) -> StripEstimate {
    let w = spec.trace_width;
    let t = spec.metal_thickness;
    let span = side - w;
    let mass = spec.conductor.density * w * t * span;
    let kappa = cantilever_stiffness(spec.conductor.youngs_modulus, w, t, span);
    StripEstimate {
        span,
        mass,
        kappa,
        shock_deflection: shock_deflection(kappa, mass, shock_accel),
        f_resonant: resonant_frequency(kappa, mass),
    }
}

/// Outermost and innermost winding sides.
pub fn strip_estimates(spec: &SpiralSpec, shock_accel: f64) -> (StripEstimate, StripEstimate) {
    let n = 4 * spec.turns as usize;
    let outer = spec.side_length(n.saturating_sub(1));
    let inner = spec.side_length(0);
    (
        strip_estimate(spec, outer, shock_accel),
        strip_estimate(spec, inner, shock_accel),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MechReport {
    pub kappa_outer: f64,
    pub kappa_inner: f64,
    pub shock_deflection_outer: f64,
    pub shock_deflection_inner: f64,
    /// From the outer strip.
    pub f_resonant: f64,
    pub f_max_impact_pillar: Option<f64>,
    pub f_max_impact_xbeam: Option<f64>,
    /// xbeam / pillar, when both were computed.
    pub enhancement: Option<f64>,
}

/// Frame model with or without X-beam supports.
pub fn frame_for(spec: &SpiralSpec, with_xbeam: bool, elements_per_segment: usize) -> Result<FrameModel> {
    let s = if with_xbeam {
        spec.with_xbeam(Some(spec.xbeam.clone().unwrap_or_else(XBeamSpec::standard)))
    } else {
        spec.with_xbeam(None)
    };
    build_frame(&s, &generate_layout(&s)?, elements_per_segment)
}

pub fn impact_force(spec: &SpiralSpec, with_xbeam: bool, settings: &MechSettings, exec: Exec) -> Result<ImpactResult> {
    let model = frame_for(spec, with_xbeam, settings.elements_per_segment)?;
    max_impact_force(&model, settings.deflection_limit, exec)
}

pub fn analyze(spec: &SpiralSpec, settings: &MechSettings, mode: XBeamMode, exec: Exec) -> Result<MechReport> {
    let (outer, inner) = strip_estimates(spec, settings.shock_accel);
    let pillar = match mode {
        XBeamMode::Off | XBeamMode::Both => Some(impact_force(spec, false, settings, exec)?.force),
        XBeamMode::On => None,
    };
    let xbeam = match mode {
        XBeamMode::On | XBeamMode::Both => Some(impact_force(spec, true, settings, exec)?.force),
        XBeamMode::Off => None,
    };
    Ok(MechReport {
        kappa_outer: outer.kappa,
        kappa_inner: inner.kappa,
        shock_deflection_outer: outer.shock_deflection,
        shock_deflection_inner: inner.shock_deflection,
        f_resonant: outer.f_resonant,
        f_max_impact_pillar: pillar,
        f_max_impact_xbeam: xbeam,
        enhancement: pillar.zip(xbeam).map(|(p, x)| x / p),
    })
}

#[cfg(test)]
mod tests;
