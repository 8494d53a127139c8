//! Touchstone v1 two-port (`.s2p`) reader and writer.
//!
//! The record keeps the numbers exactly as written (frequency in the file's
//! unit, value pairs in the file's format) so parse → write → parse is a
//! fixed point for every format. Complex S values are derived on demand.

use std::fmt::Write as _;

use nalgebra::Matrix2;

use crate::error::{Error, Result};
use crate::network::{Mat2, ParamKind, TwoPortNetwork, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FreqUnit {
    Hz,
    KHz,
    MHz,
    GHz,
}

impl FreqUnit {
    pub fn multiplier(self) -> f64 {
        match self {
            FreqUnit::Hz => 1.0,
            FreqUnit::KHz => 1e3,
            FreqUnit::MHz => 1e6,
            FreqUnit::GHz => 1e9,
        }
    }

    fn token(self) -> &'static str {
        match self {
            FreqUnit::Hz => "Hz",
            FreqUnit::KHz => "kHz",
            FreqUnit::MHz => "MHz",
            FreqUnit::GHz => "GHz",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataFormat {
    /// Real, imaginary.
    Ri,
    /// Magnitude, angle in degrees.
    Ma,
    /// dB magnitude, angle in degrees.
    Db,
}

impl DataFormat {
    fn token(self) -> &'static str {
        match self {
            DataFormat::Ri => "RI",
            DataFormat::Ma => "MA",
            DataFormat::Db => "DB",
        }
    }

    fn to_complex(self, a: f64, b: f64) -> C64 {
        match self {
            DataFormat::Ri => C64::new(a, b),
            DataFormat::Ma => C64::from_polar(a, b.to_radians()),
            DataFormat::Db => C64::from_polar(10f64.powf(a / 20.0), b.to_radians()),
        }
    }

    fn from_complex(self, z: C64) -> (f64, f64) {
        match self {
            DataFormat::Ri => (z.re, z.im),
            DataFormat::Ma => (z.norm(), z.arg().to_degrees()),
            // Exact zeros have no dB value; floor at the smallest normal magnitude.
            DataFormat::Db => (20.0 * z.norm().max(f64::MIN_POSITIVE).log10(), z.arg().to_degrees()),
        }
    }
}

/// One frequency row: the frequency in file units, then S11 S21 S12 S22 as
/// value pairs.
pub type Row = [f64; 9];

#[derive(Debug, Clone, PartialEq)]
pub struct TouchstoneRecord {
    pub unit: FreqUnit,
    pub format: DataFormat,
    pub z_ref: f64,
    pub rows: Vec<Row>,
}

impl TouchstoneRecord {
    /// S-parameter network with frequencies in Hz.
    pub fn network(&self) -> Result<TwoPortNetwork> {
        let m = self.unit.multiplier();
        let f = |r: &Row, k: usize| self.format.to_complex(r[1 + 2 * k], r[2 + 2 * k]);
        let freqs = self.rows.iter().map(|r| r[0] * m).collect();
        let mats = self
            .rows
            .iter()
            // File order is S11 S21 S12 S22.
            .map(|r| Matrix2::new(f(r, 0), f(r, 2), f(r, 1), f(r, 3)))
            .collect();
        TwoPortNetwork::new(freqs, mats, ParamKind::S, self.z_ref)
    }

    pub fn from_network(net: &TwoPortNetwork, unit: FreqUnit, format: DataFormat) -> Result<Self> {
        net.expect_kind(ParamKind::S)?;
        let m = unit.multiplier();
        let rows = net
            .frequencies()
            .iter()
            .zip(net.matrices())
            .map(|(&f, s): (&f64, &Mat2)| {
                let mut row = [0.0; 9];
                row[0] = f / m;
                for (k, z) in [s[(0, 0)], s[(1, 0)], s[(0, 1)], s[(1, 1)]].into_iter().enumerate() {
                    let (a, b) = format.from_complex(z);
                    row[1 + 2 * k] = a;
                    row[2 + 2 * k] = b;
                }
                row
            })
            .collect();
        Ok(TouchstoneRecord {
            unit,
            format,
            z_ref: net.z_ref(),
            rows,
        })
    }

    /// Writes the record in its own unit and format. Numbers use the
    /// shortest representation that reads back to the same `f64`.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "! 2-port S-parameters");
        let _ = writeln!(
            out,
            "# {} S {} R {}",
            self.unit.token(),
            self.format.token(),
            self.z_ref
        );
        for row in &self.rows {
            let cols: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
            let _ = writeln!(out, "{}", cols.join(" "));
        }
        out
    }
}

/// Default output form: Hz, RI.
pub fn write_s2p(net: &TwoPortNetwork) -> Result<String> {
    Ok(TouchstoneRecord::from_network(net, FreqUnit::Hz, DataFormat::Ri)?.serialize())
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_option_line(line_no: usize, body: &str) -> Result<(FreqUnit, DataFormat, f64)> {
    let (mut unit, mut format, mut z_ref) = (None, None, None);
    let mut tokens = body.split_whitespace();
    while let Some(tok) = tokens.next() {
        fn set<T>(slot: &mut Option<T>, v: T, what: &str, line_no: usize) -> Result<()> {
            if slot.replace(v).is_some() {
                Err(parse_err(line_no, format!("option line repeats the {what}")))
            } else {
                Ok(())
            }
        }
        match tok.to_ascii_uppercase().as_str() {
            "HZ" => set(&mut unit, FreqUnit::Hz, "frequency unit", line_no)?,
            "KHZ" => set(&mut unit, FreqUnit::KHz, "frequency unit", line_no)?,
            "MHZ" => set(&mut unit, FreqUnit::MHz, "frequency unit", line_no)?,
            "GHZ" => set(&mut unit, FreqUnit::GHz, "frequency unit", line_no)?,
            "RI" => set(&mut format, DataFormat::Ri, "data format", line_no)?,
            "MA" => set(&mut format, DataFormat::Ma, "data format", line_no)?,
            "DB" => set(&mut format, DataFormat::Db, "data format", line_no)?,
            "S" => {}
            p @ ("Y" | "Z" | "H" | "G") => {
                return Err(parse_err(line_no, format!("parameter type {p} not supported, only S")));
            }
            "R" => {
                let v = tokens
                    .next()
                    .ok_or_else(|| parse_err(line_no, "R without a reference impedance"))?;
                let z: f64 = v
                    .parse()
                    .map_err(|_| parse_err(line_no, format!("bad reference impedance '{v}'")))?;
                if !(z > 0.0 && z.is_finite()) {
                    return Err(parse_err(line_no, format!("reference impedance must be > 0, got {v}")));
                }
                if z_ref.replace(z).is_some() {
                    return Err(parse_err(line_no, "option line repeats R"));
                }
            }
            other => return Err(parse_err(line_no, format!("unknown option token '{other}'"))),
        }
    }
    // v1 defaults.
    Ok((
        unit.unwrap_or(FreqUnit::GHz),
        format.unwrap_or(DataFormat::Ma),
        z_ref.unwrap_or(50.0),
    ))
}

/// Parses a Touchstone v1 two-port file. Each data line must carry exactly
/// nine numbers.
pub fn parse_touchstone(text: &str) -> Result<TouchstoneRecord> {
    let mut options: Option<(FreqUnit, DataFormat, f64)> = None;
    let mut rows: Vec<Row> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('!').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('[') {
            return Err(parse_err(line_no, format!("Touchstone v2 keyword {line} not supported")));
        }
        if let Some(body) = line.strip_prefix('#') {
            if options.is_some() {
                return Err(parse_err(line_no, "second option line"));
            }
            if !rows.is_empty() {
                return Err(parse_err(line_no, "option line after data"));
            }
            options = Some(parse_option_line(line_no, body)?);
            continue;
        }
        let cols: Vec<&str> = line.split_whitespace().collect();
        if cols.len() != 9 {
            return Err(parse_err(
                line_no,
                format!("expected 9 columns for a two-port row, found {}", cols.len()),
            ));
        }
        let mut row = [0.0; 9];
        for (slot, c) in row.iter_mut().zip(&cols) {
            *slot = c
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| parse_err(line_no, format!("bad number '{c}'")))?;
        }
        if let Some(prev) = rows.last() {
            if !(row[0] > prev[0]) {
                return Err(parse_err(line_no, "frequencies must be strictly increasing"));
            }
        }
        if row[0] < 0.0 {
            return Err(parse_err(line_no, "negative frequency"));
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(parse_err(text.lines().count().max(1), "no data rows"));
    }
    let (unit, format, z_ref) = options.unwrap_or((FreqUnit::GHz, DataFormat::Ma, 50.0));
    Ok(TouchstoneRecord {
        unit,
        format,
        z_ref,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn line_of(e: Error) -> usize {
        match e {
            Error::Parse { line, .. } => line,
            other => panic!("expected parse error, got {other}"),
        }
    }

    #[test]
    fn single_ri_point() {
        let r = parse_touchstone("# GHz S RI R 50\n1.0 0.5 0.0 0.1 0.0 0.1 0.0 0.5 0.0\n").unwrap();
        let n = r.network().unwrap();
        assert_eq!(n.frequencies(), &[1e9]);
        assert_eq!(n.matrices()[0][(0, 0)], C64::new(0.5, 0.0));
        assert_eq!(n.z_ref(), 50.0);
    }

    #[test]
    fn row_order_is_s11_s21_s12_s22() {
        let r = parse_touchstone("# Hz S RI R 50\n1 1 0 2 0 3 0 4 0\n").unwrap();
        let s = r.network().unwrap().matrices()[0];
        assert_eq!(s[(1, 0)].re, 2.0);
        assert_eq!(s[(0, 1)].re, 3.0);
    }

    #[test]
    fn ma_and_db() {
        let r = parse_touchstone("# MHz S MA R 50\n10 1 0 1 90 0 0 0 0\n").unwrap();
        let s = r.network().unwrap().matrices()[0];
        assert_eq!(s[(0, 0)], C64::new(1.0, 0.0));
        assert_relative_eq!(s[(1, 0)].im, 1.0, epsilon = 1e-15);
        let r = parse_touchstone("# GHz S DB R 50\n1 -20 0 0 0 0 0 0 0\n").unwrap();
        assert_relative_eq!(r.network().unwrap().matrices()[0][(0, 0)].re, 0.1, max_relative = 1e-14);
        assert_eq!(r.network().unwrap().frequencies(), &[1e9]);
    }

    #[test]
    fn option_tokens_any_order_and_case() {
        let r = parse_touchstone("# r 75 ri s khz\n1 0 0 0 0 0 0 0 0\n").unwrap();
        assert_eq!((r.unit, r.format, r.z_ref), (FreqUnit::KHz, DataFormat::Ri, 75.0));
    }

    #[test]
    fn comments_and_blank_lines() {
        let t = "! header\n\n# GHz S RI R 50 ! trailing\n1 0 0 0 0 0 0 0 0 ! c\n";
        assert_eq!(parse_touchstone(t).unwrap().rows.len(), 1);
    }

    #[test]
    fn errors_carry_line_numbers() {
        assert_eq!(line_of(parse_touchstone("# GHz S RI R 50\n1 0 0 0\n").unwrap_err()), 2);
        assert_eq!(
            line_of(parse_touchstone("# GHz S RI R 50\n2 0 0 0 0 0 0 0 0\n1 0 0 0 0 0 0 0 0\n").unwrap_err()),
            3
        );
        assert_eq!(line_of(parse_touchstone("!x\n# GHz Y RI R 50\n").unwrap_err()), 2);
        assert_eq!(line_of(parse_touchstone("# GHz S XX R 50\n").unwrap_err()), 1);
        assert_eq!(line_of(parse_touchstone("# GHz S RI R\n").unwrap_err()), 1);
        assert_eq!(line_of(parse_touchstone("[Version] 2.0\n").unwrap_err()), 1);
        assert_eq!(line_of(parse_touchstone("# GHz S RI R 50\n1 0 0 0 0 0 0 0 x\n").unwrap_err()), 2);
        assert!(parse_touchstone("").is_err());
    }

    #[test]
    fn fixed_point_in_every_format() {
        let text = "# GHz S RI R 50\n0.1 0.12345678901234 -0.3 0.5 0.25 0.5 0.25 0.1 -1e-3\n2.5 1e-17 0 0.7 0.1 0.7 0.1 0 0\n";
        let r = parse_touchstone(text).unwrap();
        for (unit, format) in [
            (FreqUnit::Hz, DataFormat::Ri),
            (FreqUnit::MHz, DataFormat::Ma),
            (FreqUnit::GHz, DataFormat::Db),
        ] {
            let rec = TouchstoneRecord::from_network(&r.network().unwrap(), unit, format).unwrap();
            let again = parse_touchstone(&rec.serialize()).unwrap();
            assert_eq!(again, rec);
            assert_eq!(parse_touchstone(&again.serialize()).unwrap(), again);
        }
    }
}
