use serde::Serialize;

use crate::geometry::{DielectricMode, SegmentSet, SpiralSpec};

use super::EPS_0;

/// One-pole lossy substrate branch under each port.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SubstrateModel {
    /// Ω·m
    pub resistivity: f64,
    pub rel_permittivity: f64,
    /// Fitted effective substrate thickness, m.
    pub effective_thickness: f64,
}

impl Default for SubstrateModel {
    /// 2 kΩ·cm silicon, ε_r = 11.9, 100 µm effective thickness.
    fn default() -> Self {
        SubstrateModel {
            resistivity: 20.0,
            rel_permittivity: 11.9,
            effective_thickness: 100e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShuntParasitics {
    pub cox: [f64; 2],
    pub csub: [f64; 2],
    pub rsub: [f64; 2],
}

/// Relative permittivity around the winding for a dielectric mode.
pub fn effective_permittivity(spec: &SpiralSpec) -> f64 {
    match spec.dielectric_mode {
        DielectricMode::Oxide => spec.oxide_rel_permittivity,
        DielectricMode::Airgap => 1.0,
    }
}

/// Winding footprint area, Σ length × width.
pub fn footprint_area(layout: &SegmentSet) -> f64 {
    layout.winding().map(|s| s.length() * s.width).sum()
}

/// `Cox = ε₀·ε_eff·A/gap` split half per port, with the substrate branch
/// `Csub = ε₀·ε_Si·(A/2)/t_sub`, `Rsub = 2·ρ_sub·t_sub/A` at each port.
pub fn shunt_parasitics(spec: &SpiralSpec, layout: &SegmentSet, substrate: &SubstrateModel) -> ShuntParasitics {
    let area = footprint_area(layout);
    let cox = 0.5 * EPS_0 * effective_permittivity(spec) * area / spec.airgap_height;
    let csub = EPS_0 * substrate.rel_permittivity * 0.5 * area / substrate.effective_thickness;
    let rsub = 2.0 * substrate.resistivity * substrate.effective_thickness / area;
    ShuntParasitics {
        cox: [cox; 2],
        csub: [csub; 2],
        rsub: [rsub; 2],
    }
}

/// Sidewall parallel-plate capacitance between adjacent turns,
/// `ε₀·ε_eff·t·ℓ/s`, where ℓ is the winding length facing the next turn out
/// (everything except the outermost turn).
pub fn interwinding_capacitance(spec: &SpiralSpec, layout: &SegmentSet) -> f64 {
    let sides: Vec<f64> = layout.winding().map(|s| s.length()).collect();
    let facing: f64 = sides[..sides.len().saturating_sub(4)].iter().sum();
    EPS_0 * effective_permittivity(spec) * spec.metal_thickness * facing / spec.spacing
}
