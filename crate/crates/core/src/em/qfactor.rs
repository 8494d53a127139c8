use serde::Serialize;

use crate::error::{Error, Result};
use crate::network::{ParamKind, TwoPortNetwork};

/// `Q = −Im(Y₁₁)/Re(Y₁₁)` at one frequency index.
pub fn q_factor(net: &TwoPortNetwork, index: usize) -> Result<f64> {
    net.expect_kind(ParamKind::Y)?;
    let y11 = net.matrices()[index][(0, 0)];
    if y11.re == 0.0 {
        return Err(Error::LosslessSingularity {
            freq_hz: net.frequencies()[index],
        });
    }
    Ok(-y11.im / y11.re)
}

/// `Im(1/Y₁₁)/(2πf)`
pub fn effective_inductance(net: &TwoPortNetwork, index: usize) -> f64 {
    let y11 = net.matrices()[index][(0, 0)];
    let f = net.frequencies()[index];
    y11.inv().im / (2.0 * std::f64::consts::PI * f)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QCurve {
    pub frequencies: Vec<f64>,
    pub q_values: Vec<f64>,
    pub l_eff: Vec<f64>,
    pub q_max: f64,
    pub f_peak: f64,
    /// Frequencies dropped because Re(Y₁₁) = 0 there.
    pub skipped: Vec<f64>,
}

impl QCurve {
    /// Index of the sample nearest `freq_hz` (no interpolation).
    pub fn nearest_index(&self, freq_hz: f64) -> usize {
        let mut best = 0;
        for (i, f) in self.frequencies.iter().enumerate() {
            if (f - freq_hz).abs() < (self.frequencies[best] - freq_hz).abs() {
                best = i;
            }
        }
        best
    }

    /// `(frequency actually used, l_eff there)` for a spot query.
    pub fn l_at(&self, freq_hz: f64) -> (f64, f64) {
        let i = self.nearest_index(freq_hz);
        (self.frequencies[i], self.l_eff[i])
    }
}

/// Q and effective inductance over the whole grid, with the grid-max peak.
pub fn q_curve(net: &TwoPortNetwork) -> Result<QCurve> {
    net.expect_kind(ParamKind::Y)?;
    if net.len() < 3 {
        return Err(Error::InsufficientPoints(format!(
            "Q curve needs at least 3 frequencies, got {}",
            net.len()
        )));
    }
    let mut curve = QCurve {
        frequencies: Vec::with_capacity(net.len()),
        q_values: Vec::with_capacity(net.len()),
        l_eff: Vec::with_capacity(net.len()),
        q_max: f64::NEG_INFINITY,
        f_peak: f64::NAN,
        skipped: Vec::new(),
    };
    for (i, &f) in net.frequencies().iter().enumerate() {
        match q_factor(net, i) {
            Ok(q) => {
                if q > curve.q_max {
                    curve.q_max = q;
                    curve.f_peak = f;
                }
                curve.frequencies.push(f);
                curve.q_values.push(q);
                curve.l_eff.push(effective_inductance(net, i));
            }
            Err(Error::LosslessSingularity { .. }) => curve.skipped.push(f),
            Err(e) => return Err(e),
        }
    }
    if curve.frequencies.is_empty() {
        return Err(Error::EmptyCurve);
    }
    if !curve.skipped.is_empty() {
        log::warn!("{} frequency points skipped: Re(Y11) = 0", curve.skipped.len());
    }
    Ok(curve)
}
