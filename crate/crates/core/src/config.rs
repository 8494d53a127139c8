//! TOML spec, grid and constraint files. Lengths are in µm, frequencies
//! in GHz (grid) or Hz (constraints), as the key names say.

use std::path::Path;

use serde::Deserialize;
use toml::Spanned;

use crate::em::{EmSettings, FrequencyGrid, SubstrateModel};
use crate::error::{Error, Result};
use crate::explorer::{ConstraintSet, DesignGrid, EvalSettings, Objective};
use crate::geometry::{validate_spec, DielectricMode, LaminateLayer, SpiralSpec, XBeamSpec};
use crate::material::MaterialTable;
use crate::mech::{MechSettings, G_ACCEL};

const UM: f64 = 1e-6;

fn default_conductor() -> Spanned<String> {
    Spanned::new(0..0, "Cu".to_string())
}

fn default_eps_ox() -> f64 {
    3.9
}

fn default_arm_width() -> f64 {
    10.0
}

fn default_true() -> bool {
    true
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpiralSection {
    inner_diameter: f64,
    trace_width: f64,
    spacing: f64,
    turns: u32,
    metal_thickness: f64,
    airgap_height: f64,
    lead_gap: f64,
    dielectric_mode: Spanned<String>,
    #[serde(default = "default_conductor")]
    conductor: Spanned<String>,
    #[serde(default = "default_eps_ox")]
    oxide_rel_permittivity: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LayerSection {
    material: Spanned<String>,
    thickness: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct XBeamSection {
    #[serde(default = "default_arm_width")]
    arm_width: f64,
    #[serde(default = "default_true")]
    anchored: bool,
    layers: Option<Vec<LayerSection>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SubstrateSection {
    resistivity: Option<f64>,
    rel_permittivity: Option<f64>,
    effective_thickness: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FrequencySection {
    start_ghz: Option<f64>,
    stop_ghz: Option<f64>,
    points: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AnalysisSection {
    elements_per_segment: Option<usize>,
    deflection_limit_um: Option<f64>,
    shock_g: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstraintSection {
    max_shock_deflection_um: Option<f64>,
    min_resonant_frequency_hz: Option<f64>,
    min_q: Option<f64>,
    min_inductance_nh: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GridSection {
    inner_diameter: Option<Vec<f64>>,
    trace_width: Option<Vec<f64>>,
    spacing: Option<Vec<f64>>,
    turns: Option<Vec<u32>>,
    metal_thickness: Option<Vec<f64>>,
    airgap_height: Option<Vec<f64>>,
    lead_gap: Option<Vec<f64>>,
    dielectric_mode: Option<Vec<Spanned<String>>>,
    xbeam: Option<Vec<bool>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ObjectiveSection {
    maximize: Vec<Spanned<String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    spiral: SpiralSection,
    xbeam: Option<XBeamSection>,
    substrate: Option<SubstrateSection>,
    frequency: Option<FrequencySection>,
    analysis: Option<AnalysisSection>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GridFile {
    spiral: SpiralSection,
    xbeam: Option<XBeamSection>,
    substrate: Option<SubstrateSection>,
    frequency: Option<FrequencySection>,
    analysis: Option<AnalysisSection>,
    grid: GridSection,
    constraints: Option<ConstraintSection>,
    objectives: Option<ObjectiveSection>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstraintFile {
    constraints: ConstraintSection,
}

fn line_at(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn at<T>(text: &str, s: &Spanned<T>, msg: impl Into<String>) -> Error {
    let span = s.span();
    if span.is_empty() && span.start == 0 {
        Error::Config(msg.into())
    } else {
        Error::Parse {
            line: line_at(text, span.start),
            msg: msg.into(),
        }
    }
}

fn from_toml<'de, T: Deserialize<'de>>(text: &'de str) -> Result<T> {
    toml::from_str(text).map_err(|e| match e.span() {
        Some(span) => Error::Parse {
            line: line_at(text, span.start),
            msg: e.message().trim().to_string(),
        },
        None => Error::Config(e.message().trim().to_string()),
    })
}

fn mode(text: &str, s: &Spanned<String>) -> Result<DielectricMode> {
    s.get_ref().parse().map_err(|e: Error| at(text, s, e.to_string()))
}

fn material(text: &str, table: &MaterialTable, s: &Spanned<String>) -> Result<crate::material::Material> {
    table
        .get(s.get_ref())
        .cloned()
        .map_err(|_| {
            let known: Vec<&str> = table.names().collect();
            at(text, s, format!("unknown material '{}' (known: {})", s.get_ref(), known.join(", ")))
        })
}

fn build_spec(
    text: &str,
    table: &MaterialTable,
    sp: &SpiralSection,
    xb: Option<&XBeamSection>,
) -> Result<SpiralSpec> {
    let xbeam = match xb {
        None => None,
        Some(x) => {
            let layers = match &x.layers {
                None => XBeamSpec::standard().layers,
                Some(ls) => ls
                    .iter()
                    .map(|l| {
                        Ok(LaminateLayer {
                            material: material(text, table, &l.material)?,
                            thickness: l.thickness * UM,
                        })
                    })
                    .collect::<Result<_>>()?,
            };
            Some(XBeamSpec {
                arm_width: x.arm_width * UM,
                layers,
                anchored: x.anchored,
            })
        }
    };
    Ok(SpiralSpec {
        inner_diameter: sp.inner_diameter * UM,
        trace_width: sp.trace_width * UM,
        spacing: sp.spacing * UM,
        turns: sp.turns,
        metal_thickness: sp.metal_thickness * UM,
        airgap_height: sp.airgap_height * UM,
        lead_gap: sp.lead_gap * UM,
        dielectric_mode: mode(text, &sp.dielectric_mode)?,
        conductor: material(text, table, &sp.conductor)?,
        xbeam,
        oxide_rel_permittivity: sp.oxide_rel_permittivity,
    })
}

fn build_em(sub: Option<&SubstrateSection>, freq: Option<&FrequencySection>) -> Result<EmSettings> {
    let mut em = EmSettings::default();
    if let Some(s) = sub {
        let d = SubstrateModel::default();
        em.substrate = SubstrateModel {
            resistivity: s.resistivity.unwrap_or(d.resistivity),
            rel_permittivity: s.rel_permittivity.unwrap_or(d.rel_permittivity),
            effective_thickness: s.effective_thickness.map_or(d.effective_thickness, |t| t * UM),
        };
        let ok = [em.substrate.resistivity, em.substrate.rel_permittivity, em.substrate.effective_thickness]
            .iter()
            .all(|v| *v > 0.0 && v.is_finite());
        if !ok {
            return Err(Error::Config("substrate values must be positive".into()));
        }
    }
    if let Some(f) = freq {
        let d = FrequencyGrid::default();
        em.grid = FrequencyGrid {
            start_hz: f.start_ghz.map_or(d.start_hz, |g| g * 1e9),
            stop_hz: f.stop_ghz.map_or(d.stop_hz, |g| g * 1e9),
            points: f.points.unwrap_or(d.points),
        };
        em.grid.frequencies()?;
    }
    Ok(em)
}

fn build_mech(a: Option<&AnalysisSection>) -> Result<MechSettings> {
    let mut m = MechSettings::default();
    if let Some(a) = a {
        if let Some(n) = a.elements_per_segment {
            m.elements_per_segment = n;
        }
        if let Some(l) = a.deflection_limit_um {
            m.deflection_limit = l * UM;
        }
        if let Some(g) = a.shock_g {
            m.shock_accel = g * G_ACCEL;
        }
    }
    if m.elements_per_segment == 0 || !(m.deflection_limit > 0.0) || !(m.shock_accel >= 0.0) {
        return Err(Error::Config(
            "analysis needs elements_per_segment ≥ 1, deflection_limit_um > 0, shock_g ≥ 0".into(),
        ));
    }
    Ok(m)
}

fn build_constraints(c: Option<&ConstraintSection>) -> Result<ConstraintSet> {
    let mut out = ConstraintSet::default();
    if let Some(c) = c {
        out.max_shock_deflection = c.max_shock_deflection_um.map(|v| v * UM);
        if let Some(f) = c.min_resonant_frequency_hz {
            out.min_resonant_frequency = f;
        }
        out.min_q = c.min_q;
        out.min_inductance = c.min_inductance_nh.map(|v| v * 1e-9);
    }
    out.check()?;
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpecConfig {
    pub spec: SpiralSpec,
    pub settings: EvalSettings,
}

pub fn parse_spec(text: &str, table: &MaterialTable) -> Result<SpecConfig> {
    let f: SpecFile = from_toml(text)?;
    let spec = build_spec(text, table, &f.spiral, f.xbeam.as_ref())?;
    let violations = validate_spec(&spec);
    if !violations.is_empty() {
        return Err(Error::InvalidSpec(violations));
    }
    Ok(SpecConfig {
        spec,
        settings: EvalSettings {
            em: build_em(f.substrate.as_ref(), f.frequency.as_ref())?,
            mech: build_mech(f.analysis.as_ref())?,
        },
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub grid: DesignGrid,
    pub settings: EvalSettings,
    pub constraints: ConstraintSet,
    pub objectives: Vec<Objective>,
}

pub fn parse_grid(text: &str, table: &MaterialTable) -> Result<SweepConfig> {
    let f: GridFile = from_toml(text)?;
    let base = build_spec(text, table, &f.spiral, f.xbeam.as_ref())?;
    let mut grid = DesignGrid::new(base);
    let um = |v: &Option<Vec<f64>>| v.as_ref().map_or(vec![], |v| v.iter().map(|x| x * UM).collect());
    let g = &f.grid;
    grid.inner_diameter = um(&g.inner_diameter);
    grid.trace_width = um(&g.trace_width);
    grid.spacing = um(&g.spacing);
    grid.turns = g.turns.clone().unwrap_or_default();
    grid.metal_thickness = um(&g.metal_thickness);
    grid.airgap_height = um(&g.airgap_height);
    grid.lead_gap = um(&g.lead_gap);
    grid.dielectric_mode = g
        .dielectric_mode
        .as_ref()
        .map_or(Ok(vec![]), |v| v.iter().map(|s| mode(text, s)).collect::<Result<_>>())?;
    grid.xbeam = g.xbeam.clone().unwrap_or_default();

    let objectives = match &f.objectives {
        None => Objective::DEFAULT.to_vec(),
        Some(o) => {
            let v = o
                .maximize
                .iter()
                .map(|s| s.get_ref().parse().map_err(|e: Error| at(text, s, e.to_string())))
                .collect::<Result<Vec<Objective>>>()?;
            if v.is_empty() {
                return Err(Error::Config("objectives.maximize is empty".into()));
            }
            v
        }
    };
    Ok(SweepConfig {
        grid,
        settings: EvalSettings {
            em: build_em(f.substrate.as_ref(), f.frequency.as_ref())?,
            mech: build_mech(f.analysis.as_ref())?,
        },
        constraints: build_constraints(f.constraints.as_ref())?,
        objectives,
    })
}

/// A standalone `[constraints]` file.
pub fn parse_constraints(text: &str) -> Result<ConstraintSet> {
    let f: ConstraintFile = from_toml(text)?;
    build_constraints(Some(&f.constraints))
}

pub fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const REFERENCE: &str = r#"
[spiral]
inner_diameter = 100.0
trace_width = 10.0
spacing = 2.0
turns = 10
metal_thickness = 1.0
airgap_height = 2.5
lead_gap = 1.6
dielectric_mode = "airgap"
"#;

    fn table() -> MaterialTable {
        MaterialTable::default()
    }

    #[test]
    fn reference_spec_round_trips() {
        let c = parse_spec(REFERENCE, &table()).unwrap();
        let p = SpiralSpec::reference_device();
        assert_eq!(c.spec.turns, p.turns);
        for (a, b) in [
            (c.spec.inner_diameter, p.inner_diameter),
            (c.spec.trace_width, p.trace_width),
            (c.spec.airgap_height, p.airgap_height),
            (c.spec.lead_gap, p.lead_gap),
        ] {
            assert!((a - b).abs() <= 1e-15 * b);
        }
        assert_eq!(c.spec.conductor, p.conductor);
        assert_eq!(c.settings, EvalSettings::default());
    }

    #[test]
    fn xbeam_section_defaults_to_standard_laminate() {
        let c = parse_spec(&format!("{REFERENCE}\n[xbeam]\n"), &table()).unwrap();
        assert_eq!(c.spec.xbeam.unwrap().layers, XBeamSpec::standard().layers);
    }

    #[test]
    fn errors_point_at_lines() {
        let bad_mode = REFERENCE.replace("\"airgap\"", "\"vacuum\"");
        match parse_spec(&bad_mode, &table()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 10),
            other => panic!("{other:?}"),
        }
        let typo = REFERENCE.replace("spacing", "spaceing");
        assert!(matches!(parse_spec(&typo, &table()), Err(Error::Parse { .. })));
        let bad_mat = format!("{REFERENCE}conductor = \"unobtainium\"\n");
        match parse_spec(&bad_mat, &table()) {
            Err(Error::Parse { line, msg }) => {
                assert_eq!(line, 11);
                assert!(msg.contains("unobtainium"));
            }
            other => panic!("{other:?}"),
        }
        assert!(parse_spec("", &table()).is_err());
    }

    #[test]
    fn invalid_geometry_is_rejected() {
        let t = REFERENCE.replace("spacing = 2.0", "spacing = 0.0");
        assert!(matches!(parse_spec(&t, &table()), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn grid_file() {
        let text = format!(
            "{REFERENCE}\n[grid]\nturns = [1, 2, 3]\nxbeam = [false, true]\n\n[constraints]\nmin_q = 2.0\n\n[objectives]\nmaximize = [\"q_max\", \"l_total\"]\n"
        );
        let c = parse_grid(&text, &table()).unwrap();
        assert_eq!(c.grid.len(), 6);
        assert_eq!(c.constraints.min_q, Some(2.0));
        assert_eq!(c.objectives, vec![Objective::QMax, Objective::LTotal]);
        let bad = text.replace("\"l_total\"", "\"beauty\"");
        match parse_grid(&bad, &table()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 20),
            other => panic!("{other:?}"),
        }
        let wrong_type = text.replace("turns = [1, 2, 3]", "turns = [1, \"two\"]");
        match parse_grid(&wrong_type, &table()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 13),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn constraint_file() {
        let c = parse_constraints("[constraints]\nmax_shock_deflection_um = 0.5\nmin_resonant_frequency_hz = 2000.0\n").unwrap();
        assert_eq!(c.max_shock_deflection, Some(0.5e-6));
        assert_eq!(c.min_resonant_frequency, 2000.0);
        assert!(parse_constraints("[constraints]\nmin_q = -1.0\n").is_err());
    }
}
