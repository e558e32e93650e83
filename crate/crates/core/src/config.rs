//! Run configuration: one JSON document, versioned, with units in key names.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::calibration::{CalibrationOptions, CalibrationReport, Fittable, RobotSpec};
use crate::error::{Error, Result};
use crate::granular::StaticDragModel;
use crate::robot::{DualAugerRobot, SolverOptions, UpliftModel};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MediumSpec {
    pub name: String,
    pub particle_diameter_mm: f64,
    pub relative_density: f64,
    pub static_drag: Fittable<StaticDragModel>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NumericSettings {
    /// Relative tolerance on the thrust/drag balance.
    pub tol: f64,
    pub bracket_mm_s: [f64; 2],
    pub max_iterations: usize,
    pub dt_s: f64,
    pub duration_s: f64,
}

impl Default for NumericSettings {
    fn default() -> Self {
        let s = SolverOptions::default();
        NumericSettings {
            tol: s.tol,
            bracket_mm_s: [s.bracket_mm_s.0, s.bracket_mm_s.1],
            max_iterations: s.max_iterations,
            dt_s: 0.1,
            duration_s: 475.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub schema: u32,
    pub medium: MediumSpec,
    pub robot: RobotSpec,
    pub uplift: UpliftModel,
    #[serde(default)]
    pub calibration: CalibrationOptions,
    #[serde(default)]
    pub numeric: NumericSettings,
    /// Filled in by calibration.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit_report: Option<CalibrationReport>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::Config(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported schema {}; this build reads schema {SCHEMA_VERSION}",
                self.schema
            )));
        }
        let n = &self.numeric;
        let positive =
            [("tol", n.tol), ("dt_s", n.dt_s), ("duration_s", n.duration_s), ("bracket_mm_s[0]", n.bracket_mm_s[0])];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Config(format!("numeric.{name} must be > 0, got {v}")));
            }
        }
        if !(n.bracket_mm_s[1] > n.bracket_mm_s[0]) || !n.bracket_mm_s[1].is_finite() {
            return Err(Error::Config("numeric.bracket_mm_s must be increasing".into()));
        }
        if n.max_iterations == 0 {
            return Err(Error::Config("numeric.max_iterations must be > 0".into()));
        }
        if let Some(m) = self.medium.static_drag.value() {
            m.validate().map_err(|e| Error::Config(e.to_string()))?;
        }
        self.uplift.validate()?;
        self.calibration.bounds.validate()
    }

    pub fn solver_options(&self) -> SolverOptions {
        SolverOptions {
            bracket_mm_s: (self.numeric.bracket_mm_s[0], self.numeric.bracket_mm_s[1]),
            tol: self.numeric.tol,
            max_iterations: self.numeric.max_iterations,
        }
    }

    /// The calibrated robot; a configuration error while anything is still `"fit"`.
    pub fn robot(&self) -> Result<DualAugerRobot> {
        self.robot.build(&self.medium.static_drag)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> RunConfig {
        RunConfig {
            schema: 1,
            medium: MediumSpec {
                name: "glass beads".into(),
                particle_diameter_mm: 2.0,
                relative_density: 0.462,
                static_drag: Fittable::FIT,
            },
            robot: RobotSpec::unfitted(),
            uplift: UpliftModel { kappa: 0.25, onset_time_s: 30.0 },
            calibration: CalibrationOptions::default(),
            numeric: NumericSettings::default(),
            fit_report: None,
        }
    }

    #[test]
    fn json_round_trip() {
        let cfg = sample();
        let text = cfg.to_json().unwrap();
        assert!(text.contains("\"static_drag\": \"fit\""));
        assert_eq!(RunConfig::from_json(&text).unwrap(), cfg);
    }

    #[test]
    fn uncalibrated_robot_is_config_error() {
        let err = sample().robot().unwrap_err();
        assert!(matches!(err, Error::Config(_)));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn schema_checked() {
        let mut cfg = sample();
        cfg.schema = 2;
        assert!(RunConfig::from_json(&cfg.to_json().unwrap()).is_err());
    }
}
