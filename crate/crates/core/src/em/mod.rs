//! Electrical model: Greenhouse inductance, skin-effect resistance, shunt
//! parasitics, the π-model two-port and Q(f) extraction.

mod inductance;
mod parasitics;
mod pi;
mod qfactor;
mod resistance;

pub use inductance::{
    bar_gmd, filament_mutual, segment_mutual_inductance, segment_self_inductance, total_inductance,
};
pub use parasitics::{
    effective_permittivity, footprint_area, interwinding_capacitance, shunt_parasitics,
    ShuntParasitics, SubstrateModel,
};
pub use pi::{pi_to_network, PiModel};
pub use qfactor::{effective_inductance, q_curve, q_factor, QCurve};
pub use resistance::{effective_thickness, series_resistance, skin_depth};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::geometry::{generate_layout, Segment, SegmentSet, SpiralSpec};
use crate::network::TwoPortNetwork;

pub const MU_0: f64 = 1.256_637_062_12e-6;
pub const EPS_0: f64 = 8.854_187_812_8e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrequencyGrid {
    pub start_hz: f64,
    pub stop_hz: f64,
    pub points: usize,
}

impl Default for FrequencyGrid {
    fn default() -> Self {
        FrequencyGrid {
            start_hz: 0.1e9,
            stop_hz: 10e9,
            points: 200,
        }
    }
}

impl FrequencyGrid {
    /// Log-spaced samples, endpoints included.
    pub fn frequencies(&self) -> Result<Vec<f64>> {
        if !(self.start_hz > 0.0 && self.stop_hz > self.start_hz && self.points >= 2) {
            return Err(Error::Config(format!(
                "frequency grid needs 0 < start < stop and at least 2 points, got {self:?}"
            )));
        }
        let (a, b) = (self.start_hz.log10(), self.stop_hz.log10());
        let n = self.points - 1;
        Ok((0..=n)
            .map(|i| {
                if i == n {
                    self.stop_hz
                } else {
                    10f64.powf(a + (b - a) * i as f64 / n as f64)
                }
            })
            .collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct EmSettings {
    pub substrate: SubstrateModel,
    pub grid: FrequencyGrid,
}

/// Assembles the π model of a layout.
pub fn build_pi_model(spec: &SpiralSpec, layout: &SegmentSet, substrate: &SubstrateModel) -> Result<PiModel> {
    let winding: Vec<Segment> = layout.winding().cloned().collect();
    let ls = total_inductance(&winding)?;
    let rs_dc = series_resistance(&winding, &spec.conductor, 0.0);
    let shunt = shunt_parasitics(spec, layout, substrate);
    let model = PiModel {
        ls,
        rs_dc,
        skin_resistivity: spec.conductor.resistivity.unwrap_or(0.0),
        skin_thickness: spec.metal_thickness,
        cs: interwinding_capacitance(spec, layout),
        cox: shunt.cox,
        csub: shunt.csub,
        rsub: shunt.rsub,
    };
    model.validate()?;
    Ok(model)
}

#[derive(Debug, Clone)]
pub struct ElectricalAnalysis {
    pub pi: PiModel,
    pub network: TwoPortNetwork,
    pub curve: QCurve,
}

impl ElectricalAnalysis {
    pub fn l_total(&self) -> f64 {
        self.pi.ls
    }
}

/// Layout → π model → Y network → Q curve.
pub fn analyze(spec: &SpiralSpec, settings: &EmSettings, exec: Exec) -> Result<ElectricalAnalysis> {
    let layout = generate_layout(spec)?;
    let pi = build_pi_model(spec, &layout, &settings.substrate)?;
    let network = pi_to_network(&pi, &settings.grid.frequencies()?, exec)?;
    let curve = q_curve(&network)?;
    Ok(ElectricalAnalysis { pi, network, curve })
}
