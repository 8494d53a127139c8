//! Square-spiral layout.
//!
//! Winding convention: the spiral starts at the inner opening corner
//! `(-d/2, -d/2)` and runs counterclockwise (+x, +y, -x, -y), winding
//! outward. Side `k` (0-based) has centerline length
//! `d + ceil(k/2) * pitch`, so every second side grows by one pitch and
//! parallel centerlines of adjacent turns are exactly one pitch apart.
//!
//! Heights: winding centerline at `airgap_height + t/2`, lead centerline at
//! `lead_gap + t/2`, X-beam arms directly beneath the winding with their top
//! face at `airgap_height`.
//!
//! All coordinates are in meters.

use nalgebra::{Point3, Vector3};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::material::Material;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DielectricMode {
    Oxide,
    Airgap,
}

impl std::str::FromStr for DielectricMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "oxide" => Ok(DielectricMode::Oxide),
            "airgap" => Ok(DielectricMode::Airgap),
            other => Err(Error::Config(format!(
                "dielectric_mode must be 'oxide' or 'airgap', got '{other}'"
            ))),
        }
    }
}

impl std::fmt::Display for DielectricMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DielectricMode::Oxide => "oxide",
            DielectricMode::Airgap => "airgap",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LaminateLayer {
    pub material: Material,
    pub thickness: f64,
}

/// Crossed support beams under the winding. Layers are listed top first.
#[derive(Debug, Clone, PartialEq)]
pub struct XBeamSpec {
    pub arm_width: f64,
    pub layers: Vec<LaminateLayer>,
    pub anchored: bool,
}

impl XBeamSpec {
    /// Si₃N₄ 0.1 µm over SiO₂ 0.6 µm, 10 µm arms, anchored at the corners.
    pub fn standard() -> Self {
        XBeamSpec {
            arm_width: 10e-6,
            layers: vec![
                LaminateLayer {
                    material: Material::silicon_nitride(),
                    thickness: 0.1e-6,
                },
                LaminateLayer {
                    material: Material::silicon_dioxide(),
                    thickness: 0.6e-6,
                },
            ],
            anchored: true,
        }
    }

    pub fn total_thickness(&self) -> f64 {
        self.layers.iter().map(|l| l.thickness).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpiralSpec {
    pub inner_diameter: f64,
    pub trace_width: f64,
    pub spacing: f64,
    pub turns: u32,
    pub metal_thickness: f64,
    /// Conductor-to-substrate gap.
    pub airgap_height: f64,
    /// Lead-wire-to-substrate gap.
    pub lead_gap: f64,
    pub dielectric_mode: DielectricMode,
    pub conductor: Material,
    pub xbeam: Option<XBeamSpec>,
    pub oxide_rel_permittivity: f64,
}

impl SpiralSpec {
    /// The fabricated 10-turn device: 100 µm inner diameter, 10 µm width,
    /// 2 µm spacing, 1 µm Cu, 2.5 µm air gap, 1.6 µm lead gap.
    pub fn reference_device() -> Self {
        SpiralSpec {
            inner_diameter: 100e-6,
            trace_width: 10e-6,
            spacing: 2e-6,
            turns: 10,
            metal_thickness: 1e-6,
            airgap_height: 2.5e-6,
            lead_gap: 1.6e-6,
            dielectric_mode: DielectricMode::Airgap,
            conductor: Material::copper(),
            xbeam: None,
            oxide_rel_permittivity: 3.9,
        }
    }

    pub fn pitch(&self) -> f64 {
        self.trace_width + self.spacing
    }

    /// Centerline length of winding side `k`.
    pub fn side_length(&self, k: usize) -> f64 {
        self.inner_diameter + k.div_ceil(2) as f64 * self.pitch()
    }

    pub fn with_mode(&self, mode: DielectricMode) -> Self {
        SpiralSpec {
            dielectric_mode: mode,
            ..self.clone()
        }
    }

    pub fn with_xbeam(&self, xbeam: Option<XBeamSpec>) -> Self {
        SpiralSpec {
            xbeam,
            ..self.clone()
        }
    }

    pub fn winding_z(&self) -> f64 {
        self.airgap_height + 0.5 * self.metal_thickness
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub field: &'static str,
    pub message: String,
}

fn positive(out: &mut Vec<Violation>, field: &'static str, v: f64) {
    if !(v.is_finite() && v > 0.0) {
        out.push(Violation {
            field,
            message: format!("must be a finite length > 0, got {v:e}"),
        });
    }
}

/// Lists every violated [`SpiralSpec`] invariant; empty means valid.
pub fn validate_spec(spec: &SpiralSpec) -> Vec<Violation> {
    let mut out = Vec::new();
    positive(&mut out, "inner_diameter", spec.inner_diameter);
    positive(&mut out, "trace_width", spec.trace_width);
    positive(&mut out, "spacing", spec.spacing);
    if spec.turns < 1 {
        out.push(Violation {
            field: "turns",
            message: "must be at least 1".into(),
        });
    }
    positive(&mut out, "metal_thickness", spec.metal_thickness);
    positive(&mut out, "airgap_height", spec.airgap_height);
    positive(&mut out, "lead_gap", spec.lead_gap);
    if spec.lead_gap.is_finite()
        && spec.airgap_height.is_finite()
        && spec.lead_gap > 0.0
        && spec.lead_gap >= spec.airgap_height
    {
        out.push(Violation {
            field: "lead_gap",
            message: "lead must pass under the winding (lead_gap < airgap_height)".into(),
        });
    }
    if !(spec.oxide_rel_permittivity.is_finite() && spec.oxide_rel_permittivity > 0.0) {
        out.push(Violation {
            field: "oxide_rel_permittivity",
            message: "must be > 0".into(),
        });
    }
    let c = &spec.conductor;
    if !(c.youngs_modulus > 0.0 && c.density > 0.0) {
        out.push(Violation {
            field: "conductor_material",
            message: format!("'{}' needs youngs_modulus > 0 and density > 0", c.name),
        });
    }
    if !matches!(c.resistivity, Some(r) if r > 0.0) {
        out.push(Violation {
            field: "conductor_material",
            message: format!("'{}' has no positive resistivity", c.name),
        });
    }
    if let Some(xb) = &spec.xbeam {
        positive(&mut out, "xbeam.arm_width", xb.arm_width);
        if xb.layers.is_empty() {
            out.push(Violation {
                field: "xbeam.layers",
                message: "needs at least one layer".into(),
            });
        }
        for l in &xb.layers {
            if !(l.thickness.is_finite() && l.thickness > 0.0) {
                out.push(Violation {
                    field: "xbeam.layers",
                    message: format!("layer '{}' thickness must be > 0", l.material.name),
                });
            }
            if !(l.material.youngs_modulus > 0.0 && l.material.density > 0.0) {
                out.push(Violation {
                    field: "xbeam.layers",
                    message: format!("layer material '{}' is invalid", l.material.name),
                });
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LayerTag {
    Winding,
    Lead,
    XbeamArm,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub start: Point3<f64>,
    pub end: Point3<f64>,
    pub width: f64,
    pub thickness: f64,
    pub layer_tag: LayerTag,
}

impl Segment {
    pub fn length(&self) -> f64 {
        (self.end - self.start).norm()
    }

    pub fn direction(&self) -> Vector3<f64> {
        (self.end - self.start) / self.length()
    }

    pub fn volume(&self) -> f64 {
        self.length() * self.width * self.thickness
    }
}

/// A rigid vertical connection between two structural layers
/// (winding-to-lead via, winding-to-X-beam spacer).
#[derive(Debug, Clone, PartialEq)]
pub struct Link {
    pub upper: Point3<f64>,
    pub lower: Point3<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SegmentSet {
    pub segments: Vec<Segment>,
    /// Mechanically fixed points.
    pub anchors: Vec<Point3<f64>>,
    pub links: Vec<Link>,
}

impl SegmentSet {
    pub fn winding(&self) -> impl Iterator<Item = &Segment> {
        self.segments
            .iter()
            .filter(|s| s.layer_tag == LayerTag::Winding)
    }

    pub fn winding_count(&self) -> usize {
        self.winding().count()
    }

    pub fn winding_length(&self) -> f64 {
        self.winding().map(Segment::length).sum()
    }

    pub fn outermost_side(&self) -> f64 {
        self.winding().map(Segment::length).fold(0.0, f64::max)
    }

    pub fn innermost_side(&self) -> f64 {
        self.winding().map(Segment::length).fold(f64::INFINITY, f64::min)
    }
}

const DIRS: [(f64, f64); 4] = [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)];

pub fn generate_layout(spec: &SpiralSpec) -> Result<SegmentSet> {
    let violations = validate_spec(spec);
    if !violations.is_empty() {
        return Err(Error::InvalidSpec(violations));
    }
    let w = spec.trace_width;
    let t = spec.metal_thickness;
    let zw = spec.winding_z();
    let pitch = spec.pitch();

    let mut segments = Vec::with_capacity(4 * spec.turns as usize + 5);
    let (mut x, mut y) = (-0.5 * spec.inner_diameter, -0.5 * spec.inner_diameter);
    let origin = Point3::new(x, y, zw);
    for k in 0..4 * spec.turns as usize {
        let len = spec.side_length(k);
        let (dx, dy) = DIRS[k % 4];
        let start = Point3::new(x, y, zw);
        x += dx * len;
        y += dy * len;
        segments.push(Segment {
            start,
            end: Point3::new(x, y, zw),
            width: w,
            thickness: t,
            layer_tag: LayerTag::Winding,
        });
    }

    let (mut xmin, mut xmax, mut ymin, mut ymax) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for s in &segments {
        for p in [s.start, s.end] {
            xmin = xmin.min(p.x);
            xmax = xmax.max(p.x);
            ymin = ymin.min(p.y);
            ymax = ymax.max(p.y);
        }
    }

    // Underpass from the inner terminal straight out past the last turn.
    let zl = spec.lead_gap + 0.5 * t;
    let lead_start = Point3::new(origin.x, origin.y, zl);
    let lead_end = Point3::new(origin.x, ymin - pitch, zl);
    segments.push(Segment {
        start: lead_start,
        end: lead_end,
        width: w,
        thickness: t,
        layer_tag: LayerTag::Lead,
    });
    let mut anchors = vec![lead_start, lead_end];
    let mut links = vec![Link {
        upper: origin,
        lower: lead_start,
    }];

    if let Some(xb) = &spec.xbeam {
        let zx = spec.airgap_height - 0.5 * xb.total_thickness();
        let (x0, x1, y0, y1) = (xmin - pitch, xmax + pitch, ymin - pitch, ymax + pitch);
        let arms = [((x0, y0), (x1, y1)), ((x1, y0), (x0, y1))];
        let center = line_intersection(arms[0], arms[1])
            .expect("diagonals of a box always intersect");
        let center_pt = Point3::new(center.0, center.1, zx);
        let winding: Vec<Segment> = segments
            .iter()
            .filter(|s| s.layer_tag == LayerTag::Winding)
            .cloned()
            .collect();
        let mut crossings: Vec<(f64, f64)> = Vec::new();
        for &(a, b) in &arms {
            for corner in [a, b] {
                let corner_pt = Point3::new(corner.0, corner.1, zx);
                segments.push(Segment {
                    start: corner_pt,
                    end: center_pt,
                    width: xb.arm_width,
                    thickness: xb.total_thickness(),
                    layer_tag: LayerTag::XbeamArm,
                });
                if xb.anchored {
                    anchors.push(corner_pt);
                }
            }
            for seg in &winding {
                let Some(c) = segment_intersection(
                    (a, b),
                    ((seg.start.x, seg.start.y), (seg.end.x, seg.end.y)),
                ) else {
                    continue;
                };
                // Near a corner the arm clips both sides meeting there; one
                // spacer per corner.
                if crossings
                    .iter()
                    .any(|p| ((p.0 - c.0).powi(2) + (p.1 - c.1).powi(2)).sqrt() < w)
                {
                    continue;
                }
                crossings.push(c);
            }
        }
        for (cx, cy) in crossings {
            links.push(Link {
                upper: Point3::new(cx, cy, zw),
                lower: Point3::new(cx, cy, zx),
            });
        }
    }

    Ok(SegmentSet {
        segments,
        anchors,
        links,
    })
}

type P2 = (f64, f64);

fn cross2(a: P2, b: P2) -> f64 {
    a.0 * b.1 - a.1 * b.0
}

fn line_params(p: (P2, P2), q: (P2, P2)) -> Option<(f64, f64)> {
    let r = (p.1 .0 - p.0 .0, p.1 .1 - p.0 .1);
    let s = (q.1 .0 - q.0 .0, q.1 .1 - q.0 .1);
    let denom = cross2(r, s);
    if denom.abs() < 1e-30 {
        return None;
    }
    let qp = (q.0 .0 - p.0 .0, q.0 .1 - p.0 .1);
    Some((cross2(qp, s) / denom, cross2(qp, r) / denom))
}

fn line_intersection(p: (P2, P2), q: (P2, P2)) -> Option<P2> {
    let (t, _) = line_params(p, q)?;
    Some((p.0 .0 + t * (p.1 .0 - p.0 .0), p.0 .1 + t * (p.1 .1 - p.0 .1)))
}

/// Intersection of two closed 2D segments, evaluated on the second one so
/// the point lies exactly on the axis-aligned winding side.
fn segment_intersection(p: (P2, P2), q: (P2, P2)) -> Option<P2> {
    let (t, u) = line_params(p, q)?;
    if !(0.0..=1.0).contains(&t) || !(0.0..=1.0).contains(&u) {
        return None;
    }
    Some((q.0 .0 + u * (q.1 .0 - q.0 .0), q.0 .1 + u * (q.1 .1 - q.0 .1)))
}

/// Edge-to-edge distance between two winding segments drawn as rectangles
/// with square ends (each side extended by half a width).
pub fn clear_distance(a: &Segment, b: &Segment) -> f64 {
    let rect = |s: &Segment| {
        let h = 0.5 * s.width;
        (
            s.start.x.min(s.end.x) - h,
            s.start.x.max(s.end.x) + h,
            s.start.y.min(s.end.y) - h,
            s.start.y.max(s.end.y) + h,
        )
    };
    let (ax0, ax1, ay0, ay1) = rect(a);
    let (bx0, bx1, by0, by1) = rect(b);
    let dx = (bx0 - ax1).max(ax0 - bx1).max(0.0);
    let dy = (by0 - ay1).max(ay0 - by1).max(0.0);
    dx.hypot(dy)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SegmentMasses {
    pub per_segment: Vec<f64>,
    pub total: f64,
}

/// Mass of every segment in the set as if made of `material`.
pub fn conductor_mass(segments: &[Segment], material: &Material) -> SegmentMasses {
    let per_segment: Vec<f64> = segments
        .iter()
        .map(|s| s.volume() * material.density)
        .collect();
    let total = per_segment.iter().sum();
    SegmentMasses { per_segment, total }
}
