//! Open de-embedding and Q/L extraction from measured two-ports.

use serde::Serialize;

use crate::em::{q_curve, QCurve};
use crate::error::{Error, Result};
use crate::network::{Mat2, ParamKind, TwoPortNetwork, C64};

fn check_same_grid(a: &TwoPortNetwork, b: &TwoPortNetwork) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::GridMismatch(format!("{} points vs {} points", a.len(), b.len())));
    }
    if let Some(i) = a.frequencies().iter().zip(b.frequencies()).position(|(x, y)| x != y) {
        return Err(Error::GridMismatch(format!(
            "index {i}: {:e} Hz vs {:e} Hz",
            a.frequencies()[i],
            b.frequencies()[i]
        )));
    }
    Ok(())
}

fn combine(a: &TwoPortNetwork, b: &TwoPortNetwork, f: impl Fn(&Mat2, &Mat2) -> Mat2) -> Result<TwoPortNetwork> {
    a.expect_kind(ParamKind::Y)?;
    b.expect_kind(ParamKind::Y)?;
    check_same_grid(a, b)?;
    let m = a.matrices().iter().zip(b.matrices()).map(|(x, y)| f(x, y)).collect();
    TwoPortNetwork::new(a.frequencies().to_vec(), m, ParamKind::Y, a.z_ref())
}

/// `Y_dut = Y_complete − Y_open`, sample by sample. Grids must match
/// exactly.
pub fn open_deembed(complete: &TwoPortNetwork, open_dummy: &TwoPortNetwork) -> Result<TwoPortNetwork> {
    combine(complete, open_dummy, |c, o| c - o)
}

/// Parallel connection of two Y networks (`Y_a + Y_b`).
pub fn add_parallel(a: &TwoPortNetwork, b: &TwoPortNetwork) -> Result<TwoPortNetwork> {
    combine(a, b, |x, y| x + y)
}

pub fn is_all_zero(net: &TwoPortNetwork) -> bool {
    net.matrices().iter().all(|m| m.iter().all(|z| *z == C64::new(0.0, 0.0)))
}

/// `|X12 − X21| ≤ tol·max(|X12|, |X21|)` at every sample.
pub fn is_reciprocal(net: &TwoPortNetwork, tol: f64) -> bool {
    net.matrices().iter().all(|m| {
        let (a, b) = (m[(0, 1)], m[(1, 0)]);
        (a - b).norm() <= tol * a.norm().max(b.norm())
    })
}

/// Probe-pad parasitics of an open dummy: a lossy shunt capacitor at each
/// pad and a small pad-to-pad coupling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PadModel {
    /// F
    pub c_pad: f64,
    /// S
    pub g_pad: f64,
    /// F
    pub c_couple: f64,
}

impl Default for PadModel {
    fn default() -> Self {
        PadModel {
            c_pad: 60e-15,
            g_pad: 20e-6,
            c_couple: 4e-15,
        }
    }
}

impl PadModel {
    pub fn y_network(&self, freqs: &[f64], z_ref: f64) -> Result<TwoPortNetwork> {
        let m = freqs
            .iter()
            .map(|&f| {
                let w = 2.0 * std::f64::consts::PI * f;
                let shunt = C64::new(self.g_pad, w * self.c_pad);
                let cc = C64::new(0.0, w * self.c_couple);
                Mat2::new(shunt + cc, -cc, -cc, shunt + cc)
            })
            .collect();
        TwoPortNetwork::new(freqs.to_vec(), m, ParamKind::Y, z_ref)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpotInductance {
    pub requested_hz: f64,
    /// Nearest grid sample actually used.
    pub used_hz: f64,
    pub l_eff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metrics {
    pub q_max: f64,
    pub f_peak: f64,
    pub spot: Option<SpotInductance>,
    #[serde(skip)]
    pub curve: QCurve,
}

pub fn extract_metrics(net: &TwoPortNetwork, spot_hz: Option<f64>) -> Result<Metrics> {
    let curve = q_curve(net)?;
    let spot = spot_hz.map(|f| {
        let (used, l) = curve.l_at(f);
        SpotInductance {
            requested_hz: f,
            used_hz: used,
            l_eff: l,
        }
    });
    Ok(Metrics {
        q_max: curve.q_max,
        f_peak: curve.f_peak,
        spot,
        curve,
    })
}

/// Synthetic measurement files generated from the forward model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixtureSet {
    /// Bare device (what de-embedding should recover).
    pub dut: String,
    /// Pads only.
    pub open: String,
    /// Device plus pads.
    pub complete: String,
}

/// The air-gap reference device on the default grid, with default pads.
pub fn fixture_set() -> Result<FixtureSet> {
    let spec = crate::geometry::SpiralSpec::reference_device();
    let a = crate::em::analyze(&spec, &crate::em::EmSettings::default(), crate::exec::Exec::Sequential)?;
    let dut = a.network;
    let pads = PadModel::default().y_network(dut.frequencies(), dut.z_ref())?;
    let complete = add_parallel(&dut, &pads)?;
    let s2p = |y: &TwoPortNetwork| crate::touchstone::write_s2p(&crate::network::y_to_s(y)?);
    Ok(FixtureSet {
        dut: s2p(&dut)?,
        open: s2p(&pads)?,
        complete: s2p(&complete)?,
    })
}
