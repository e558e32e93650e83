use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Chirality of the helix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Handedness {
    Right,
    Left,
}

impl Handedness {
    pub fn mirrored(self) -> Self {
        match self {
            Handedness::Right => Handedness::Left,
            Handedness::Left => Handedness::Right,
        }
    }

    /// The rotation sense that screws this helix toward its tip.
    pub fn advancing_rotation(self) -> Rotation {
        match self {
            Handedness::Right => Rotation::Cw,
            Handedness::Left => Rotation::Ccw,
        }
    }
}

/// Rotation sense, viewed from the drive end toward the tip.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rotation {
    Cw,
    Ccw,
    Stopped,
}

impl Rotation {
    pub fn mirrored(self) -> Self {
        match self {
            Rotation::Cw => Rotation::Ccw,
            Rotation::Ccw => Rotation::Cw,
            Rotation::Stopped => Rotation::Stopped,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Rotation::Cw => "cw",
            Rotation::Ccw => "ccw",
            Rotation::Stopped => "stopped",
        }
    }
}

impl std::str::FromStr for Rotation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cw" => Ok(Rotation::Cw),
            "ccw" => Ok(Rotation::Ccw),
            "stopped" | "stop" | "" => Ok(Rotation::Stopped),
            other => Err(Error::Data(format!("unknown rotation direction {other:?}"))),
        }
    }
}

/// Rotation command of one auger.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotationState {
    pub direction: Rotation,
    pub rpm: f64,
}

impl RotationState {
    pub const STOPPED: RotationState = RotationState { direction: Rotation::Stopped, rpm: 0.0 };

    pub fn new(direction: Rotation, rpm: f64) -> Result<Self> {
        if !(rpm >= 0.0) || !rpm.is_finite() {
            return Err(domain(format!("rotation speed must be finite and >= 0, got {rpm}")));
        }
        Ok(RotationState { direction, rpm })
    }

    pub fn cw(rpm: f64) -> Result<Self> {
        Self::new(Rotation::Cw, rpm)
    }

    pub fn ccw(rpm: f64) -> Result<Self> {
        Self::new(Rotation::Ccw, rpm)
    }

    /// Speed as seen by the force laws: zero when stopped.
    pub fn effective_rpm(&self) -> f64 {
        match self.direction {
            Rotation::Stopped => 0.0,
            _ => self.rpm,
        }
    }

    /// Direction as seen by the force laws: a zero-speed command is a stop.
    pub fn effective_direction(&self) -> Rotation {
        if self.effective_rpm() == 0.0 {
            Rotation::Stopped
        } else {
            self.direction
        }
    }
}

/// Number of helical flights on an auger.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum HelixCount {
    Single,
    Double,
}

impl TryFrom<u8> for HelixCount {
    type Error = String;

    fn try_from(n: u8) -> std::result::Result<Self, String> {
        match n {
            1 => Ok(HelixCount::Single),
            2 => Ok(HelixCount::Double),
            _ => Err(format!("helix_count must be 1 or 2, got {n}")),
        }
    }
}

impl From<HelixCount> for u8 {
    fn from(h: HelixCount) -> u8 {
        match h {
            HelixCount::Single => 1,
            HelixCount::Double => 2,
        }
    }
}

/// Helical intruder geometry.
///
/// `helix_count` is carried as metadata; single and double flights produce
/// indistinguishable drag at the tested conditions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AugerSpec {
    pub outer_diameter_mm: f64,
    pub length_mm: f64,
    pub handedness: Handedness,
    pub helix_count: HelixCount,
}

impl AugerSpec {
    pub fn new(outer_diameter_mm: f64, length_mm: f64, handedness: Handedness) -> Result<Self> {
        let spec = AugerSpec { outer_diameter_mm, length_mm, handedness, helix_count: HelixCount::Single };
        spec.validate()?;
        Ok(spec)
    }

    /// The 24 mm x 60 mm right-handed single-flight auger of the dual-auger robot.
    pub fn robot_auger() -> Self {
        AugerSpec {
            outer_diameter_mm: 24.0,
            length_mm: 60.0,
            handedness: Handedness::Right,
            helix_count: HelixCount::Single,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.outer_diameter_mm > 0.0) || !self.outer_diameter_mm.is_finite() {
            return Err(domain(format!("outer diameter must be > 0 mm, got {}", self.outer_diameter_mm)));
        }
        if !(self.length_mm > 0.0) || !self.length_mm.is_finite() {
            return Err(domain(format!("length must be > 0 mm, got {}", self.length_mm)));
        }
        Ok(())
    }

    pub fn radius_m(&self) -> f64 {
        self.outer_diameter_mm * 0.5e-3
    }
}

/// Relative slip velocity: tip tangential speed over translation speed.
///
/// `λ = π·D·n / (60·v)` with `D` in mm, `n` in rpm and `v` in mm/s.
///
/// ```
/// use burrowsim::granular::slip_velocity;
/// let lambda = slip_velocity(24.0, 210.0, 26.0).unwrap();
/// assert!((lambda - 10.15).abs() < 0.01);
/// ```
pub fn slip_velocity(outer_diameter_mm: f64, rpm: f64, translation_mm_s: f64) -> Result<f64> {
    if !(translation_mm_s > 0.0) {
        return Err(domain("slip velocity undefined at zero translation"));
    }
    if !(rpm >= 0.0) {
        return Err(domain(format!("rotation speed must be >= 0, got {rpm}")));
    }
    if !(outer_diameter_mm > 0.0) {
        return Err(domain(format!("outer diameter must be > 0, got {outer_diameter_mm}")));
    }
    let lambda = PI * outer_diameter_mm * rpm / (60.0 * translation_mm_s);
    if !lambda.is_finite() {
        return Err(domain("slip velocity is not finite"));
    }
    Ok(lambda)
}

/// Axial screw action of a rotating helix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AxialAdvance {
    /// Net thrust points toward the tip.
    Advance,
    /// Net thrust points back toward the drive end.
    Retract,
    /// No rotation, no screw thrust.
    #[serde(rename = "none")]
    Neutral,
}

impl AxialAdvance {
    pub fn sign(self) -> f64 {
        match self {
            AxialAdvance::Advance => 1.0,
            AxialAdvance::Retract => -1.0,
            AxialAdvance::Neutral => 0.0,
        }
    }
}

/// Direction of the screw thrust for a handed helix under a rotation command.
pub fn axial_advance_sign(handedness: Handedness, direction: Rotation) -> AxialAdvance {
    match (handedness, direction) {
        (_, Rotation::Stopped) => AxialAdvance::Neutral,
        (Handedness::Right, Rotation::Cw) | (Handedness::Left, Rotation::Ccw) => AxialAdvance::Advance,
        (Handedness::Right, Rotation::Ccw) | (Handedness::Left, Rotation::Cw) => AxialAdvance::Retract,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slip_examples() {
        assert!((slip_velocity(24.0, 210.0, 26.0).unwrap() - 10.149_760_882).abs() < 1e-8);
        assert_eq!(slip_velocity(24.0, 0.0, 5.0).unwrap(), 0.0);
        let lambda = slip_velocity(50.8, 50.0, 1.0).unwrap();
        assert!((lambda - 133.0).abs() < 0.1, "{lambda}");
    }

    #[test]
    fn slip_rejects_bad_inputs() {
        let err = slip_velocity(24.0, 210.0, 0.0).unwrap_err();
        assert!(err.to_string().contains("zero translation"));
        assert!(slip_velocity(24.0, 210.0, -1.0).is_err());
        assert!(slip_velocity(24.0, -1.0, 5.0).is_err());
        assert!(slip_velocity(0.0, 10.0, 5.0).is_err());
    }

    #[test]
    fn advance_table() {
        use AxialAdvance::*;
        assert_eq!(axial_advance_sign(Handedness::Right, Rotation::Cw), Advance);
        assert_eq!(axial_advance_sign(Handedness::Right, Rotation::Ccw), Retract);
        assert_eq!(axial_advance_sign(Handedness::Right, Rotation::Stopped), Neutral);
        assert_eq!(axial_advance_sign(Handedness::Left, Rotation::Cw), Retract);
        assert_eq!(axial_advance_sign(Handedness::Left, Rotation::Ccw), Advance);
        assert_eq!(axial_advance_sign(Handedness::Left, Rotation::Stopped), Neutral);
    }

    #[test]
    fn zero_speed_is_a_stop() {
        let r = RotationState::cw(0.0).unwrap();
        assert_eq!(r.effective_direction(), Rotation::Stopped);
        let s = RotationState { direction: Rotation::Stopped, rpm: 120.0 };
        assert_eq!(s.effective_rpm(), 0.0);
        assert!(RotationState::cw(-3.0).is_err());
    }

    #[test]
    fn helix_count_serde() {
        let spec: AugerSpec =
            serde_json::from_str(r#"{"outer_diameter_mm":24,"length_mm":60,"handedness":"left","helix_count":2}"#)
                .unwrap();
        assert_eq!(spec.helix_count, HelixCount::Double);
        assert!(serde_json::from_str::<AugerSpec>(
            r#"{"outer_diameter_mm":24,"length_mm":60,"handedness":"left","helix_count":3}"#
        )
        .is_err());
    }
}
