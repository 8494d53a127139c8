//! Closed-form single-strip mechanics.

/// Tip stiffness of a cantilever strip loaded through its thickness,
/// `E·w·t³/(4·L³)` (identical to `3EI/L³` with `I = w·t³/12`).
pub fn cantilever_stiffness(youngs_modulus: f64, width: f64, thickness: f64, length: f64) -> f64 {
    youngs_modulus * width * thickness.powi(3) / (4.0 * length.powi(3))
}

/// Static deflection `m·a/κ` of a strip under an inertial shock.
pub fn shock_deflection(kappa: f64, mass: f64, accel: f64) -> f64 {
    mass * accel / kappa
}

/// Single-degree-of-freedom estimate `√(κ/m)/(2π)`.
pub fn resonant_frequency(kappa: f64, mass: f64) -> f64 {
    (kappa / mass).sqrt() / (2.0 * std::f64::consts::PI)
}

/// Standard gravity used for shock loads, m/s².
pub const G_ACCEL: f64 = 9.8;
