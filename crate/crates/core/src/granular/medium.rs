use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Depth law for translational drag without rotation.
///
/// `Q_static(z) = k·(z / z_ref)^α`. Granular drag is rate independent, so
/// there is no speed argument.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StaticDragModel {
    /// Drag at the reference depth, N.
    #[serde(rename = "k_n")]
    pub k: f64,
    pub alpha: f64,
    #[serde(rename = "reference_depth_m")]
    pub reference_depth: f64,
}

impl StaticDragModel {
    pub const DEFAULT_ALPHA: f64 = 1.0;

    pub fn new(k: f64, alpha: f64, reference_depth: f64) -> Result<Self> {
        let m = StaticDragModel { k, alpha, reference_depth };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k >= 0.0) || !self.k.is_finite() {
            return Err(domain(format!("static drag scale must be >= 0, got {}", self.k)));
        }
        if !(self.alpha >= 0.0) || !self.alpha.is_finite() {
            return Err(domain(format!("depth exponent must be >= 0, got {}", self.alpha)));
        }
        if !(self.reference_depth > 0.0) || !self.reference_depth.is_finite() {
            return Err(domain(format!("reference depth must be > 0, got {}", self.reference_depth)));
        }
        Ok(())
    }

    /// `(z / z_ref)^α`, the factor applied to every drag quoted at the reference depth.
    pub fn depth_scale(&self, depth_m: f64) -> Result<f64> {
        if !(depth_m >= 0.0) || !depth_m.is_finite() {
            return Err(domain(format!("depth must be >= 0, got {depth_m}")));
        }
        Ok((depth_m / self.reference_depth).powf(self.alpha))
    }

    pub fn resistance(&self, depth_m: f64) -> Result<f64> {
        Ok(self.k * self.depth_scale(depth_m)?)
    }
}

/// Static resistance at `depth_m`.
pub fn static_resistance(model: &StaticDragModel, depth_m: f64) -> Result<f64> {
    model.validate()?;
    model.resistance(depth_m)
}

/// A granular test bed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GranularMedium {
    pub name: String,
    pub particle_diameter_mm: f64,
    /// Fraction in `[0, 1]`.
    pub relative_density: f64,
    pub static_drag: StaticDragModel,
}

impl GranularMedium {
    pub fn validate(&self) -> Result<()> {
        if !(self.particle_diameter_mm > 0.0) {
            return Err(domain(format!("particle diameter must be > 0 mm, got {}", self.particle_diameter_mm)));
        }
        if !(0.0..=1.0).contains(&self.relative_density) {
            return Err(domain(format!("relative density must lie in [0, 1], got {}", self.relative_density)));
        }
        self.static_drag.validate()
    }

    /// Glass beads at 46.2 % relative density with 30 N drag at 10 cm burial.
    pub fn glass_beads() -> Self {
        GranularMedium {
            name: "glass beads".into(),
            particle_diameter_mm: 2.0,
            relative_density: 0.462,
            static_drag: StaticDragModel { k: 30.0, alpha: 1.0, reference_depth: 0.10 },
        }
    }
}
