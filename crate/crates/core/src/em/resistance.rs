use crate::geometry::Segment;
use crate::material::Material;

use super::MU_0;

/// Skin depth `√(ρ/(π·f·µ₀))`; infinite at DC.
pub fn skin_depth(resistivity: f64, freq_hz: f64) -> f64 {
    if freq_hz <= 0.0 {
        return f64::INFINITY;
    }
    (resistivity / (std::f64::consts::PI * freq_hz * MU_0)).sqrt()
}

/// Current-carrying thickness `δ·(1 − e^(−t/δ))`, equal to `t` at DC.
pub fn effective_thickness(thickness: f64, resistivity: f64, freq_hz: f64) -> f64 {
    let delta = skin_depth(resistivity, freq_hz);
    if delta.is_infinite() {
        return thickness;
    }
    delta * -(-thickness / delta).exp_m1()
}

/// `Σ ρ·l/(w·t_eff)` over the given segments.
pub fn series_resistance(segments: &[Segment], material: &Material, freq_hz: f64) -> f64 {
    let rho = material.resistivity.unwrap_or(0.0);
    segments
        .iter()
        .map(|s| rho * s.length() / (s.width * effective_thickness(s.thickness, rho, freq_hz)))
        .sum()
}
