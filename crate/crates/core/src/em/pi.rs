use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::{map_ordered, Exec};
use crate::network::{Mat2, ParamKind, TwoPortNetwork, C64};

use super::resistance::effective_thickness;

/// Lumped π equivalent: a series `Ls`/`Rs(f)` branch shunted by `Cs`,
/// and at each port `Cox` in series with `Rsub ∥ Csub` to ground.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PiModel {
    pub ls: f64,
    pub rs_dc: f64,
    /// Conductor resistivity and thickness for the skin-effect correction.
    pub skin_resistivity: f64,
    pub skin_thickness: f64,
    pub cs: f64,
    pub cox: [f64; 2],
    pub csub: [f64; 2],
    pub rsub: [f64; 2],
}

impl PiModel {
    pub fn validate(&self) -> Result<()> {
        let caps = [self.cs, self.cox[0], self.cox[1], self.csub[0], self.csub[1]];
        if !(self.ls > 0.0)
            || !(self.rs_dc > 0.0)
            || caps.iter().any(|c| !(*c >= 0.0))
            || self.rsub.iter().any(|r| !(*r > 0.0))
        {
            return Err(Error::Domain {
                what: "pi model",
                detail: format!("{self:?}"),
            });
        }
        Ok(())
    }

    /// Series resistance at `freq_hz`, `Rs_dc·t/t_eff(f)`.
    pub fn rs(&self, freq_hz: f64) -> f64 {
        if self.rs_dc == 0.0 {
            return 0.0;
        }
        let teff = effective_thickness(self.skin_thickness, self.skin_resistivity, freq_hz);
        self.rs_dc * self.skin_thickness / teff
    }

    pub fn y_matrix(&self, freq_hz: f64) -> Mat2 {
        let omega = 2.0 * std::f64::consts::PI * freq_hz;
        let jw = C64::new(0.0, omega);
        let series = C64::new(1.0, 0.0) / (C64::new(self.rs(freq_hz), 0.0) + jw * self.ls) + jw * self.cs;
        let shunt = |k: usize| {
            let ycox = jw * self.cox[k];
            if ycox == C64::new(0.0, 0.0) {
                return ycox;
            }
            let ysub = C64::new(1.0 / self.rsub[k], 0.0) + jw * self.csub[k];
            ycox * ysub / (ycox + ysub)
        };
        Mat2::new(series + shunt(0), -series, -series, series + shunt(1))
    }
}

/// Nodal-analysis Y parameters of the π circuit at every frequency.
pub fn pi_to_network(model: &PiModel, freqs: &[f64], exec: Exec) -> Result<TwoPortNetwork> {
    let matrices = map_ordered(exec, freqs, |&f| model.y_matrix(f));
    TwoPortNetwork::new(freqs.to_vec(), matrices, ParamKind::Y, 50.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn bare() -> PiModel {
        PiModel {
            ls: 0.0,
            rs_dc: 0.0,
            skin_resistivity: 1.7e-8,
            skin_thickness: 1e-6,
            cs: 0.0,
            cox: [0.0; 2],
            csub: [0.0; 2],
            rsub: [f64::INFINITY; 2],
        }
    }

    #[test]
    fn resistor_two_port() {
        let m = PiModel {
            rs_dc: 25.0,
            skin_resistivity: f64::INFINITY, // no skin effect
            ..bare()
        };
        let y = m.y_matrix(1e9);
        assert_relative_eq!(y[(0, 0)].re, 1.0 / 25.0, max_relative = 1e-9);
        assert_relative_eq!(y[(0, 1)].re, -1.0 / 25.0, max_relative = 1e-9);
        assert!(y[(0, 0)].im.abs() < 1e-15);
    }

    #[test]
    fn pure_inductor() {
        let m = PiModel { ls: 5e-9, ..bare() };
        let f = 2e9;
        let y = m.y_matrix(f);
        let expect = C64::new(1.0, 0.0) / C64::new(0.0, 2.0 * std::f64::consts::PI * f * 5e-9);
        assert_relative_eq!(y[(0, 0)].im, expect.im, max_relative = 1e-14);
        assert_eq!(y[(0, 0)].re, 0.0);
    }

    #[test]
    fn validate_rejects_bad_values() {
        assert!(bare().validate().is_err());
        let ok = PiModel {
            ls: 1e-9,
            rs_dc: 1.0,
            rsub: [1e3; 2],
            ..bare()
        };
        ok.validate().unwrap();
        assert!(PiModel { cs: -1.0, ..ok }.validate().is_err());
    }
}
