use serde::Serialize;

use crate::geometry::LaminateLayer;
use crate::material::Material;

/// Rectangular (possibly laminated) beam cross-section. Layers are listed
/// top first; a homogeneous section is a single layer.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamSection {
    pub width: f64,
    pub layers: Vec<LaminateLayer>,
}

/// Products the frame element needs: axial, out-of-plane bending, in-plane
/// bending and torsional rigidity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SectionStiffness {
    pub ea: f64,
    pub ei_out: f64,
    pub ei_in: f64,
    pub gj: f64,
}

/// Saint-Venant constant of a solid rectangle,
/// `a·b³·(1/3 − 0.21·(b/a)·(1 − b⁴/(12a⁴)))` with `b ≤ a`.
pub fn torsion_constant(width: f64, thickness: f64) -> f64 {
    let a = width.max(thickness);
    let b = width.min(thickness);
    a * b.powi(3) * (1.0 / 3.0 - 0.21 * (b / a) * (1.0 - b.powi(4) / (12.0 * a.powi(4))))
}

impl BeamSection {
    pub fn homogeneous(width: f64, thickness: f64, material: &Material) -> Self {
        BeamSection {
            width,
            layers: vec![LaminateLayer {
                material: material.clone(),
                thickness,
            }],
        }
    }

    pub fn laminate(width: f64, layers: Vec<LaminateLayer>) -> Self {
        BeamSection { width, layers }
    }

    pub fn thickness(&self) -> f64 {
        self.layers.iter().map(|l| l.thickness).sum()
    }

    pub fn area(&self) -> f64 {
        self.width * self.thickness()
    }

    /// Geometric `w·t³/12` of the full section (out-of-plane bending).
    pub fn inertia(&self) -> f64 {
        self.width * self.thickness().powi(3) / 12.0
    }

    pub fn mass_per_length(&self) -> f64 {
        self.layers
            .iter()
            .map(|l| self.width * l.thickness * l.material.density)
            .sum()
    }

    /// Transformed-section rigidities. Out-of-plane bending is taken about
    /// the modulus-weighted neutral axis.
    pub fn stiffness(&self) -> SectionStiffness {
        let w = self.width;
        let total = self.thickness();
        // Layer centroids measured up from the bottom face.
        let mut z_top = total;
        let mut parts = Vec::with_capacity(self.layers.len());
        for l in &self.layers {
            parts.push((l, z_top - 0.5 * l.thickness));
            z_top -= l.thickness;
        }
        let ea: f64 = parts
            .iter()
            .map(|(l, _)| l.material.youngs_modulus * w * l.thickness)
            .sum();
        let neutral = parts
            .iter()
            .map(|(l, z)| l.material.youngs_modulus * w * l.thickness * z)
            .sum::<f64>()
            / ea;
        let ei_out = parts
            .iter()
            .map(|(l, z)| {
                let a = w * l.thickness;
                l.material.youngs_modulus * (w * l.thickness.powi(3) / 12.0 + a * (z - neutral).powi(2))
            })
            .sum();
        let ei_in = parts
            .iter()
            .map(|(l, _)| l.material.youngs_modulus * l.thickness * w.powi(3) / 12.0)
            .sum();
        let g_avg = parts
            .iter()
            .map(|(l, _)| l.material.shear_modulus() * l.thickness)
            .sum::<f64>()
            / total;
        SectionStiffness {
            ea,
            ei_out,
            ei_in,
            gj: g_avg * torsion_constant(w, total),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::XBeamSpec;
    use approx::assert_relative_eq;

    #[test]
    fn homogeneous_matches_textbook() {
        let cu = Material::copper();
        let s = BeamSection::homogeneous(10e-6, 1e-6, &cu);
        let k = s.stiffness();
        assert_relative_eq!(s.area(), 1e-11);
        assert_relative_eq!(k.ea, 130e9 * 1e-11, max_relative = 1e-14);
        assert_relative_eq!(k.ei_out, 130e9 * 10e-6 * 1e-18 / 12.0, max_relative = 1e-12);
        assert_relative_eq!(k.ei_in, 130e9 * 1e-6 * 1e-15 / 12.0, max_relative = 1e-12);
        // t/w = 0.1: 1/3 − 0.021·(1 − 1e-4/12)
        let j = 10e-6 * 1e-18 * (1.0 / 3.0 - 0.021 * (1.0 - 1e-4 / 12.0));
        assert_relative_eq!(torsion_constant(10e-6, 1e-6), j, max_relative = 1e-14);
        assert_eq!(torsion_constant(1e-6, 10e-6), torsion_constant(10e-6, 1e-6));
    }

    #[test]
    fn single_layer_laminate_equals_homogeneous() {
        let m = Material::silicon_dioxide();
        let a = BeamSection::homogeneous(8e-6, 0.7e-6, &m).stiffness();
        let b = BeamSection::laminate(
            8e-6,
            vec![
                LaminateLayer { material: m.clone(), thickness: 0.3e-6 },
                LaminateLayer { material: m.clone(), thickness: 0.4e-6 },
            ],
        )
        .stiffness();
        assert_relative_eq!(a.ei_out, b.ei_out, max_relative = 1e-12);
        assert_relative_eq!(a.ea, b.ea, max_relative = 1e-12);
    }

    #[test]
    fn laminate_at_least_as_stiff_as_any_layer() {
        let xb = XBeamSpec::standard();
        let sec = BeamSection::laminate(xb.arm_width, xb.layers.clone());
        let eq = sec.stiffness().ei_out;
        for l in &xb.layers {
            let alone = BeamSection::homogeneous(xb.arm_width, l.thickness, &l.material).stiffness().ei_out;
            assert!(eq >= alone);
        }
        assert_relative_eq!(sec.thickness(), 0.7e-6, max_relative = 1e-12);
    }
}
