//! The dual-auger burrowing robot: two augers either side of a finned stator,
//! a mast carrying two tracking markers, and the force balance that decides
//! whether it can drive itself through the bed.

mod balance;
mod equilibrium;
mod markers;
mod trajectory;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::granular::{
    axial_advance_sign, slip_velocity, AugerSpec, ReductionCurve, Rotation, RotationState, StaticDragModel, ThrustCurve,
};

pub use balance::ForceBalanceReading;
pub use equilibrium::{
    drag_floor, equilibrium_speed, equilibrium_speed_at, self_burrowing_predicate, total_thrust, SolverOptions,
};
pub use markers::{inclination_from_markers, marker_track_to_motion, MarkerMotion};
pub use trajectory::{simulate_trajectory, Trajectory, TrajectoryPoint, UpliftModel};

/// Static translational drag carried by each component at the reference depth, N.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComponentShares {
    #[serde(rename = "d_stator_n")]
    pub stator: f64,
    #[serde(rename = "d_front_n")]
    pub front: f64,
    #[serde(rename = "d_back_n")]
    pub back: f64,
}

impl ComponentShares {
    pub fn new(stator: f64, front: f64, back: f64) -> Result<Self> {
        let s = ComponentShares { stator, front, back };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("stator", self.stator), ("front", self.front), ("back", self.back)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(domain(format!("{name} drag share must be >= 0, got {v}")));
            }
        }
        Ok(())
    }

    pub fn total(&self) -> f64 {
        self.stator + self.front + self.back
    }
}

/// Reduction curves keyed by rotation sense.
///
/// Both curves are expressed for a right-handed auger. A left-handed auger is
/// looked up through its mirror image, so `cw` always names the advancing
/// rotation of a right-handed helix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePair {
    pub cw: ReductionCurve,
    pub ccw: ReductionCurve,
}

impl CurvePair {
    /// `η` for an auger of the given handedness; 1 for a stopped auger.
    pub fn eta(&self, auger: &AugerSpec, rotation: Rotation, lambda: f64) -> Result<f64> {
        let as_right_handed = match auger.handedness {
            crate::granular::Handedness::Right => rotation,
            crate::granular::Handedness::Left => rotation.mirrored(),
        };
        match as_right_handed {
            Rotation::Stopped => Ok(1.0),
            Rotation::Cw => self.cw.eval(lambda),
            Rotation::Ccw => self.ccw.eval(lambda),
        }
    }

    fn floor(&self, auger: &AugerSpec, rotation: Rotation) -> f64 {
        let as_right_handed = match auger.handedness {
            crate::granular::Handedness::Right => rotation,
            crate::granular::Handedness::Left => rotation.mirrored(),
        };
        match as_right_handed {
            Rotation::Stopped => 1.0,
            Rotation::Cw => self.cw.floor(),
            Rotation::Ccw => self.ccw.floor(),
        }
    }
}

/// How a thrust curve was measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThrustBasis {
    /// Measured on the whole robot with both augers turning; each auger supplies half.
    #[default]
    WholeRobot,
    /// Measured per auger.
    PerAuger,
}

impl ThrustBasis {
    fn per_auger_fraction(self) -> f64 {
        match self {
            ThrustBasis::WholeRobot => 0.5,
            ThrustBasis::PerAuger => 1.0,
        }
    }
}

/// Horizontal translation speed and the rotation command of each auger.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobotKinematics {
    pub v_mm_s: f64,
    pub front: RotationState,
    pub back: RotationState,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualAugerRobot {
    pub front: AugerSpec,
    pub back: AugerSpec,
    pub stator_dims_mm: [f64; 3],
    pub burial_depth_m: f64,
    pub marker_a_height_m: f64,
    pub marker_b_height_m: f64,
    pub mast_length_m: f64,
    pub shares: ComponentShares,
    pub curves: CurvePair,
    pub thrust: ThrustCurve,
    #[serde(default)]
    pub thrust_basis: ThrustBasis,
    /// Depth law; its scale `k` is the total static drag at the reference depth.
    pub static_drag: StaticDragModel,
}

impl DualAugerRobot {
    /// Robot geometry as built: 24 x 60 mm augers, 50 x 50 x 70 mm stator,
    /// 10 cm burial, markers 11.5 cm and 13.5 cm up a 31 cm mast.
    pub fn with_model(
        shares: ComponentShares,
        curves: CurvePair,
        thrust: ThrustCurve,
        static_drag: StaticDragModel,
    ) -> Self {
        DualAugerRobot {
            front: AugerSpec::robot_auger(),
            back: AugerSpec::robot_auger(),
            stator_dims_mm: [50.0, 50.0, 70.0],
            burial_depth_m: 0.10,
            marker_a_height_m: 0.115,
            marker_b_height_m: 0.135,
            mast_length_m: 0.31,
            shares,
            curves,
            thrust,
            thrust_basis: ThrustBasis::WholeRobot,
            static_drag,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.front.validate()?;
        self.back.validate()?;
        if self.stator_dims_mm.iter().any(|d| !(*d > 0.0)) {
            return Err(Error::Config("stator dimensions must be > 0".into()));
        }
        if !(self.burial_depth_m > 0.0) {
            return Err(Error::Config(format!("burial depth must be > 0, got {}", self.burial_depth_m)));
        }
        if !(self.marker_a_height_m > 0.0 && self.marker_b_height_m > self.marker_a_height_m) {
            return Err(Error::Config("marker heights must satisfy 0 < marker A < marker B".into()));
        }
        if !(self.mast_length_m >= self.marker_b_height_m) {
            return Err(Error::Config("mast is shorter than the marker B height".into()));
        }
        self.shares.validate()?;
        self.curves.cw.validate()?;
        self.curves.ccw.validate()?;
        self.static_drag.validate()
    }

    /// Command that turns both augers at `rpm` in the sense that screws them forward.
    pub fn burrowing_kinematics(&self, rpm: f64, v_mm_s: f64) -> Result<RobotKinematics> {
        Ok(RobotKinematics {
            v_mm_s,
            front: RotationState::new(self.front.handedness.advancing_rotation(), rpm)?,
            back: RotationState::new(self.back.handedness.advancing_rotation(), rpm)?,
        })
    }

    /// Signed screw thrust of one auger, positive toward the heading.
    pub fn auger_thrust(&self, auger: &AugerSpec, rotation: &RotationState) -> Result<f64> {
        let sense = axial_advance_sign(auger.handedness, rotation.effective_direction());
        let magnitude = self.thrust.eval(rotation.effective_rpm())?;
        Ok(sense.sign() * magnitude * self.thrust_basis.per_auger_fraction())
    }

    fn auger_eta(&self, auger: &AugerSpec, rotation: &RotationState, v_mm_s: f64) -> Result<f64> {
        let direction = rotation.effective_direction();
        if direction == Rotation::Stopped {
            return Ok(1.0);
        }
        let lambda = slip_velocity(auger.outer_diameter_mm, rotation.effective_rpm(), v_mm_s)?;
        self.curves.eta(auger, direction, lambda)
    }

    /// Drag at the reference depth, before depth scaling.
    fn reference_drag(&self, kin: &RobotKinematics) -> Result<f64> {
        let eta_front = self.auger_eta(&self.front, &kin.front, kin.v_mm_s)?;
        let eta_back = self.auger_eta(&self.back, &kin.back, kin.v_mm_s)?;
        Ok(self.shares.stator + self.shares.front * eta_front + self.shares.back * eta_back)
    }

    /// Reference-depth drag in the limit `v → 0⁺`.
    fn reference_drag_floor(&self, kin: &RobotKinematics) -> f64 {
        let floor = |auger: &AugerSpec, rot: &RotationState| self.curves.floor(auger, rot.effective_direction());
        self.shares.stator
            + self.shares.front * floor(&self.front, &kin.front)
            + self.shares.back * floor(&self.back, &kin.back)
    }
}

/// Translational drag of the whole robot at `depth_m`.
///
/// Stator share plus each auger share reduced by its own `η(λ)`, scaled by
/// the depth law.
pub fn component_drag(robot: &DualAugerRobot, kin: &RobotKinematics, depth_m: f64) -> Result<f64> {
    if !(kin.v_mm_s > 0.0) {
        return Err(domain("slip velocity undefined at zero translation"));
    }
    let scale = robot.static_drag.depth_scale(depth_m)?;
    Ok(scale * robot.reference_drag(kin)?)
}

/// Screw thrust of both augers minus drag; positive drives the robot forward.
pub fn net_axial_force(robot: &DualAugerRobot, kin: &RobotKinematics, depth_m: f64) -> Result<f64> {
    let drag = component_drag(robot, kin, depth_m)?;
    let thrust = robot.auger_thrust(&robot.front, &kin.front)? + robot.auger_thrust(&robot.back, &kin.back)?;
    Ok(thrust - drag)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn robot() -> DualAugerRobot {
        DualAugerRobot::with_model(
            ComponentShares::new(2.0, 16.0, 5.0).unwrap(),
            CurvePair {
                cw: ReductionCurve::new(0.25, 9.0, 1.2).unwrap(),
                ccw: ReductionCurve::new(0.9, 9.0, 1.2).unwrap(),
            },
            ThrustCurve::measured(),
            StaticDragModel::new(30.0, 1.0, 0.10).unwrap(),
        )
    }

    #[test]
    fn stopped_robot_carries_full_shares() {
        let r = robot();
        let kin = RobotKinematics { v_mm_s: 5.0, front: RotationState::STOPPED, back: RotationState::STOPPED };
        assert_eq!(component_drag(&r, &kin, 0.10).unwrap(), 23.0);
        assert_eq!(component_drag(&r, &kin, 0.05).unwrap(), 11.5);
        assert_eq!(net_axial_force(&r, &kin, 0.10).unwrap(), -23.0);
    }

    #[test]
    fn requires_motion() {
        let r = robot();
        let kin = r.burrowing_kinematics(210.0, 0.0).unwrap();
        assert!(component_drag(&r, &kin, 0.1).is_err());
    }

    #[test]
    fn retracting_auger_subtracts_thrust() {
        let mut r = robot();
        r.thrust_basis = ThrustBasis::PerAuger;
        let kin = RobotKinematics {
            v_mm_s: 5.0,
            front: RotationState::cw(210.0).unwrap(),
            back: RotationState::ccw(210.0).unwrap(),
        };
        let drag = component_drag(&r, &kin, 0.1).unwrap();
        assert!((net_axial_force(&r, &kin, 0.1).unwrap() + drag).abs() < 1e-12);
    }

    #[test]
    fn left_handed_auger_is_mirrored() {
        let mut r = robot();
        let kin_right = r.burrowing_kinematics(160.0, 3.0).unwrap();
        let right = component_drag(&r, &kin_right, 0.1).unwrap();
        r.front.handedness = crate::granular::Handedness::Left;
        r.back.handedness = crate::granular::Handedness::Left;
        let kin_left = r.burrowing_kinematics(160.0, 3.0).unwrap();
        assert_eq!(kin_left.front.direction, Rotation::Ccw);
        assert_eq!(component_drag(&r, &kin_left, 0.1).unwrap(), right);
        assert!(r.auger_thrust(&r.front, &kin_left.front).unwrap() > 0.0);
    }

    #[test]
    fn validation() {
        let mut r = robot();
        r.validate().unwrap();
        r.marker_b_height_m = 0.1;
        assert!(r.validate().is_err());
    }
}
