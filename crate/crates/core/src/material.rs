use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Environment variable naming a TOML file that overrides or extends the
/// built-in material table.
pub const MATERIALS_ENV: &str = "AIRSPIRAL_MATERIALS";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Material {
    pub name: String,
    /// Pa
    pub youngs_modulus: f64,
    /// kg/m³
    pub density: f64,
    #[serde(default = "default_poisson")]
    pub poisson_ratio: f64,
    /// Ω·m, conductors only.
    #[serde(default)]
    pub resistivity: Option<f64>,
    /// Dielectrics only.
    #[serde(default)]
    pub rel_permittivity: Option<f64>,
}

fn default_poisson() -> f64 {
    0.3
}

impl Material {
    pub fn shear_modulus(&self) -> f64 {
        self.youngs_modulus / (2.0 * (1.0 + self.poisson_ratio))
    }

    pub fn copper() -> Self {
        Material {
            name: "Cu".into(),
            youngs_modulus: 130e9,
            density: 8960.0,
            poisson_ratio: 0.34,
            resistivity: Some(1.7e-8),
            rel_permittivity: None,
        }
    }

    pub fn aluminum() -> Self {
        Material {
            name: "Al".into(),
            youngs_modulus: 74.14e9,
            density: 2700.0,
            poisson_ratio: 0.33,
            resistivity: Some(2.65e-8),
            rel_permittivity: None,
        }
    }

    pub fn silicon_dioxide() -> Self {
        Material {
            name: "SiO2".into(),
            youngs_modulus: 70e9,
            density: 2200.0,
            poisson_ratio: 0.17,
            resistivity: None,
            rel_permittivity: Some(3.9),
        }
    }

    pub fn silicon_nitride() -> Self {
        Material {
            name: "Si3N4".into(),
            youngs_modulus: 250e9,
            density: 3100.0,
            poisson_ratio: 0.23,
            resistivity: None,
            rel_permittivity: Some(7.5),
        }
    }

    pub fn silicon() -> Self {
        Material {
            name: "Si".into(),
            youngs_modulus: 169e9,
            density: 2329.0,
            poisson_ratio: 0.28,
            resistivity: None,
            rel_permittivity: Some(11.9),
        }
    }

    pub fn check(&self) -> Result<()> {
        if !(self.youngs_modulus > 0.0) || !(self.density > 0.0) {
            return Err(Error::Config(format!(
                "material '{}' needs youngs_modulus > 0 and density > 0",
                self.name
            )));
        }
        Ok(())
    }
}

/// Name-keyed material lookup.
#[derive(Debug, Clone, PartialEq)]
pub struct MaterialTable {
    materials: BTreeMap<String, Material>,
}

impl Default for MaterialTable {
    fn default() -> Self {
        let mut materials = BTreeMap::new();
        for m in [
            Material::copper(),
            Material::aluminum(),
            Material::silicon_dioxide(),
            Material::silicon_nitride(),
            Material::silicon(),
        ] {
            materials.insert(m.name.clone(), m);
        }
        MaterialTable { materials }
    }
}

#[derive(Deserialize)]
struct OverrideFile {
    #[serde(default)]
    materials: BTreeMap<String, OverrideEntry>,
}

#[derive(Deserialize)]
struct OverrideEntry {
    youngs_modulus: Option<f64>,
    density: Option<f64>,
    poisson_ratio: Option<f64>,
    resistivity: Option<f64>,
    rel_permittivity: Option<f64>,
}

impl MaterialTable {
    pub fn get(&self, name: &str) -> Result<&Material> {
        self.materials
            .get(name)
            .ok_or_else(|| Error::UnknownMaterial(name.to_string()))
    }

    pub fn insert(&mut self, m: Material) {
        self.materials.insert(m.name.clone(), m);
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.materials.keys().map(String::as_str)
    }

    /// Applies a TOML override of the form
    ///
    /// ```toml
    /// [materials.Cu]
    /// density = 8900.0
    /// ```
    ///
    /// Unknown names create new entries, which then need `youngs_modulus`
    /// and `density`.
    pub fn apply_overrides(&mut self, text: &str) -> Result<()> {
        let file: OverrideFile =
            toml::from_str(text).map_err(|e| Error::Config(format!("material table: {e}")))?;
        for (name, o) in file.materials {
            let mut m = match self.materials.get(&name) {
                Some(m) => m.clone(),
                None => Material {
                    name: name.clone(),
                    youngs_modulus: o.youngs_modulus.unwrap_or(f64::NAN),
                    density: o.density.unwrap_or(f64::NAN),
                    poisson_ratio: default_poisson(),
                    resistivity: None,
                    rel_permittivity: None,
                },
            };
            if let Some(v) = o.youngs_modulus {
                m.youngs_modulus = v;
            }
            if let Some(v) = o.density {
                m.density = v;
            }
            if let Some(v) = o.poisson_ratio {
                m.poisson_ratio = v;
            }
            if o.resistivity.is_some() {
                m.resistivity = o.resistivity;
            }
            if o.rel_permittivity.is_some() {
                m.rel_permittivity = o.rel_permittivity;
            }
            m.check()?;
            self.materials.insert(name, m);
        }
        Ok(())
    }

    /// Default table, plus the file named by [`MATERIALS_ENV`] when set.
    pub fn from_env() -> Result<Self> {
        let mut table = Self::default();
        if let Ok(path) = std::env::var(MATERIALS_ENV) {
            let text = std::fs::read_to_string(&path).map_err(|source| Error::Io {
                path: path.clone().into(),
                source,
            })?;
            table.apply_overrides(&text)?;
        }
        Ok(table)
    }
}
