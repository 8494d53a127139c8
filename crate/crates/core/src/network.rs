//! Frequency-sampled two-port data and S/Y conversion.

use nalgebra::{Complex, Matrix2};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type Mat2 = Matrix2<C64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamKind {
    S,
    Y,
}

impl ParamKind {
    pub fn name(self) -> &'static str {
        match self {
            ParamKind::S => "S",
            ParamKind::Y => "Y",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoPortNetwork {
    frequencies: Vec<f64>,
    matrices: Vec<Mat2>,
    kind: ParamKind,
    z_ref: f64,
}

impl TwoPortNetwork {
    pub fn new(frequencies: Vec<f64>, matrices: Vec<Mat2>, kind: ParamKind, z_ref: f64) -> Result<Self> {
        if frequencies.is_empty() {
            return Err(Error::MalformedNetwork("no frequency points".into()));
        }
        if frequencies.len() != matrices.len() {
            return Err(Error::MalformedNetwork(format!(
                "{} frequencies but {} matrices",
                frequencies.len(),
                matrices.len()
            )));
        }
        if let Some(i) = frequencies.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::MalformedNetwork(format!(
                "frequencies not strictly increasing at index {}",
                i + 1
            )));
        }
        if !(z_ref > 0.0 && z_ref.is_finite()) {
            return Err(Error::MalformedNetwork(format!("z_ref must be > 0, got {z_ref}")));
        }
        Ok(TwoPortNetwork {
            frequencies,
            matrices,
            kind,
            z_ref,
        })
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn matrices(&self) -> &[Mat2] {
        &self.matrices
    }

    pub fn kind(&self) -> ParamKind {
        self.kind
    }

    pub fn z_ref(&self) -> f64 {
        self.z_ref
    }

    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    pub fn expect_kind(&self, kind: ParamKind) -> Result<()> {
        if self.kind != kind {
            return Err(Error::WrongKind {
                expected: kind.name(),
                found: self.kind.name(),
            });
        }
        Ok(())
    }

    pub(crate) fn with_matrices(&self, matrices: Vec<Mat2>, kind: ParamKind) -> Self {
        debug_assert_eq!(matrices.len(), self.frequencies.len());
        TwoPortNetwork {
            frequencies: self.frequencies.clone(),
            matrices,
            kind,
            z_ref: self.z_ref,
        }
    }
}

fn convert(
    net: &TwoPortNetwork,
    from: ParamKind,
    to: ParamKind,
    what: &'static str,
    f: impl Fn(&Mat2) -> Option<Mat2>,
) -> Result<TwoPortNetwork> {
    net.expect_kind(from)?;
    let mut out = Vec::with_capacity(net.len());
    for (index, m) in net.matrices.iter().enumerate() {
        match f(m) {
            Some(y) => out.push(y),
            None => {
                return Err(Error::Conversion {
                    index,
                    freq_hz: net.frequencies[index],
                    what,
                })
            }
        }
    }
    Ok(net.with_matrices(out, to))
}

/// `Y = (1/z0)·(I − S)·(I + S)⁻¹`
pub fn s_to_y(net: &TwoPortNetwork) -> Result<TwoPortNetwork> {
    let g = C64::new(1.0 / net.z_ref, 0.0);
    convert(net, ParamKind::S, ParamKind::Y, "I + S", |s| {
        let id = Mat2::identity();
        let inv = (id + s).try_inverse()?;
        Some((id - s) * inv * g)
    })
}

/// `S = (I − z0·Y)·(I + z0·Y)⁻¹`
pub fn y_to_s(net: &TwoPortNetwork) -> Result<TwoPortNetwork> {
    let z0 = C64::new(net.z_ref, 0.0);
    convert(net, ParamKind::Y, ParamKind::S, "I + z0·Y", |y| {
        let id = Mat2::identity();
        let zy = y * z0;
        let inv = (id + zy).try_inverse()?;
        Some((id - zy) * inv)
    })
}
