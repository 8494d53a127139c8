use std::collections::BTreeSet;

use nalgebra::Point3;

use crate::error::{Error, Result};
use crate::geometry::{LayerTag, SegmentSet, SpiralSpec, XBeamSpec};

use super::section::BeamSection;

/// Nodes closer than this are the same node.
pub const MERGE_TOL: f64 = 1e-12;

pub const DOF_PER_NODE: usize = 6;

const DOF_NAMES: [&str; 6] = ["ux", "uy", "uz", "rx", "ry", "rz"];

pub fn dof_name(dof: usize) -> String {
    format!("node {} {}", dof / DOF_PER_NODE, DOF_NAMES[dof % DOF_PER_NODE])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementKind {
    Winding,
    Lead,
    XbeamArm,
    Connector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    pub nodes: [usize; 2],
    pub section: BeamSection,
    pub kind: ElementKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameModel {
    pub nodes: Vec<Point3<f64>>,
    pub elements: Vec<Element>,
    /// Fixed global DOF indices (`6·node + component`).
    pub constraints: BTreeSet<usize>,
    /// Global force vector, 6 entries per node (N, N·m).
    pub loads: Vec<f64>,
    /// Free nodes on the winding, the candidates for impact loading.
    pub winding_nodes: Vec<usize>,
}

impl FrameModel {
    pub fn dof_count(&self) -> usize {
        DOF_PER_NODE * self.nodes.len()
    }

    pub fn element_length(&self, e: &Element) -> f64 {
        (self.nodes[e.nodes[1]] - self.nodes[e.nodes[0]]).norm()
    }

    pub fn fix_node(&mut self, node: usize) {
        for k in 0..DOF_PER_NODE {
            self.constraints.insert(DOF_PER_NODE * node + k);
        }
    }

    /// Adds a force along global z at a node.
    pub fn add_vertical_load(&mut self, node: usize, force: f64) {
        self.loads[DOF_PER_NODE * node + 2] += force;
    }

    pub fn validate(&self) -> Result<()> {
        if self.loads.len() != self.dof_count() {
            return Err(Error::InvalidFrame(format!(
                "load vector has {} entries for {} DOFs",
                self.loads.len(),
                self.dof_count()
            )));
        }
        for (i, e) in self.elements.iter().enumerate() {
            if e.nodes.iter().any(|&n| n >= self.nodes.len()) {
                return Err(Error::InvalidFrame(format!("element {i} references a missing node")));
            }
            if !(self.element_length(e) > 0.0) {
                return Err(Error::InvalidFrame(format!("element {i} has zero length")));
            }
        }
        if let Some(&d) = self.constraints.iter().find(|&&d| d >= self.dof_count()) {
            return Err(Error::InvalidFrame(format!("constraint on missing DOF {d}")));
        }
        if self.constraints.is_empty() {
            return Err(Error::Unconstrained);
        }
        Ok(())
    }
}

fn find_node(nodes: &[Point3<f64>], p: &Point3<f64>) -> Option<usize> {
    nodes.iter().position(|q| (q - p).norm() <= MERGE_TOL)
}

struct NodeRegistry {
    nodes: Vec<Point3<f64>>,
}

impl NodeRegistry {
    fn get_or_insert(&mut self, p: Point3<f64>) -> usize {
        if let Some(i) = self.find(&p) {
            return i;
        }
        self.nodes.push(p);
        self.nodes.len() - 1
    }

    fn find(&self, p: &Point3<f64>) -> Option<usize> {
        find_node(&self.nodes, p)
    }
}

/// Parameters along `a → b` at which `p` lies on the segment.
fn param_on_segment(a: &Point3<f64>, b: &Point3<f64>, p: &Point3<f64>) -> Option<f64> {
    let d = b - a;
    let len2 = d.norm_squared();
    let t = (p - a).dot(&d) / len2;
    if !(-1e-12..=1.0 + 1e-12).contains(&t) {
        return None;
    }
    let off = (a + d * t - p).norm();
    (off <= 1e-9 * len2.sqrt().max(1e-6)).then_some(t.clamp(0.0, 1.0))
}

/// Discretizes a layout into a 3D frame.
///
/// Each segment is cut into `elements_per_segment` equal elements, plus
/// extra cuts where a link (via or X-beam spacer) lands on it. Links become
/// short connector elements of square conductor section, which are rigid
/// compared with the suspended spans. Anchors fix all six DOFs.
pub fn build_frame(spec: &SpiralSpec, layout: &SegmentSet, elements_per_segment: usize) -> Result<FrameModel> {
    if elements_per_segment == 0 {
        return Err(Error::InvalidFrame("elements_per_segment must be at least 1".into()));
    }
    if layout.anchors.is_empty() {
        return Err(Error::Unconstrained);
    }
    let xbeam = spec.xbeam.clone().unwrap_or_else(XBeamSpec::standard);
    let link_points: Vec<Point3<f64>> = layout
        .links
        .iter()
        .flat_map(|l| [l.upper, l.lower])
        .collect();

    let mut reg = NodeRegistry { nodes: Vec::new() };
    let mut elements = Vec::new();
    let mut winding_nodes = BTreeSet::new();

    for seg in &layout.segments {
        let (kind, section) = match seg.layer_tag {
            LayerTag::Winding => (
                ElementKind::Winding,
                BeamSection::homogeneous(seg.width, seg.thickness, &spec.conductor),
            ),
            LayerTag::Lead => (
                ElementKind::Lead,
                BeamSection::homogeneous(seg.width, seg.thickness, &spec.conductor),
            ),
            LayerTag::XbeamArm => (
                ElementKind::XbeamArm,
                BeamSection::laminate(seg.width, xbeam.layers.clone()),
            ),
        };
        let mut params: Vec<f64> = (0..=elements_per_segment)
            .map(|k| k as f64 / elements_per_segment as f64)
            .collect();
        params.extend(
            link_points
                .iter()
                .filter_map(|p| param_on_segment(&seg.start, &seg.end, p)),
        );
        params.sort_by(f64::total_cmp);
        let len = seg.length();
        params.dedup_by(|b, a| (*b - *a) * len <= MERGE_TOL);

        let ids: Vec<usize> = params
            .iter()
            .map(|&t| {
                let p = if t == 1.0 {
                    seg.end
                } else {
                    seg.start + (seg.end - seg.start) * t
                };
                reg.get_or_insert(p)
            })
            .collect();
        for pair in ids.windows(2) {
            elements.push(Element {
                nodes: [pair[0], pair[1]],
                section: section.clone(),
                kind,
            });
        }
        if kind == ElementKind::Winding {
            winding_nodes.extend(ids);
        }
    }

    for link in &layout.links {
        let (Some(a), Some(b)) = (reg.find(&link.upper), reg.find(&link.lower)) else {
            return Err(Error::InvalidFrame(format!(
                "link at ({:e}, {:e}) does not land on two segments",
                link.upper.x, link.upper.y
            )));
        };
        elements.push(Element {
            nodes: [a, b],
            section: BeamSection::homogeneous(spec.trace_width, spec.trace_width, &spec.conductor),
            kind: ElementKind::Connector,
        });
    }

    let n = reg.nodes.len();
    let mut model = FrameModel {
        nodes: reg.nodes,
        elements,
        constraints: BTreeSet::new(),
        loads: vec![0.0; DOF_PER_NODE * n],
        winding_nodes: Vec::new(),
    };
    for a in &layout.anchors {
        let node = find_node(&model.nodes, a).ok_or_else(|| Error::InvalidFrame("anchor does not coincide with a node".into()))?;
        model.fix_node(node);
    }
    model.winding_nodes = winding_nodes
        .into_iter()
        .filter(|&i| !model.constraints.contains(&(DOF_PER_NODE * i)))
        .collect();
    model.validate()?;
    Ok(model)
}
