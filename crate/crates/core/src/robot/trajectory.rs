use serde::{Deserialize, Serialize};

use super::{equilibrium_speed_at, DualAugerRobot, SolverOptions};
use crate::error::{Error, Result};

/// Kinematic drift toward the free surface.
///
/// After `onset_time_s` the robot rises `kappa` metres per metre of
/// horizontal advance. No force is attached to the drift.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UpliftModel {
    pub kappa: f64,
    pub onset_time_s: f64,
}

impl UpliftModel {
    pub const NONE: UpliftModel = UpliftModel { kappa: 0.0, onset_time_s: 0.0 };

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa >= 0.0) || !self.kappa.is_finite() {
            return Err(Error::Config(format!("kappa must be finite and >= 0, got {}", self.kappa)));
        }
        if !(self.onset_time_s >= 0.0) || !self.onset_time_s.is_finite() {
            return Err(Error::Config(format!("uplift onset must be >= 0 s, got {}", self.onset_time_s)));
        }
        Ok(())
    }

    /// Mast angle while drifting: 90° less the path pitch.
    pub fn tilted_theta_deg(&self) -> f64 {
        90.0 - self.kappa.atan().to_degrees()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub t_s: f64,
    /// Horizontal travel, m.
    pub x_m: f64,
    /// Depth below the surface, m (positive down).
    pub z_m: f64,
    /// Mast-to-ground angle; 90° is an upright mast.
    pub theta_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub points: Vec<TrajectoryPoint>,
    /// The front auger reached the surface before `duration` elapsed.
    pub surfaced: bool,
}

impl Trajectory {
    pub fn first(&self) -> &TrajectoryPoint {
        &self.points[0]
    }

    pub fn last(&self) -> &TrajectoryPoint {
        &self.points[self.points.len() - 1]
    }

    /// Horizontal travel over the run, m.
    pub fn travel(&self) -> f64 {
        self.last().x_m - self.first().x_m
    }

    /// Vertical rise over the run, m.
    pub fn rise(&self) -> f64 {
        self.first().z_m - self.last().z_m
    }
}

/// Quasi-static forward-Euler run at constant `rpm`.
///
/// Each step the horizontal speed is the thrust/drag equilibrium at the
/// current depth; there is no inertia. The run stops early when the depth
/// reaches the front auger radius, with the last step shortened to land
/// exactly on it. Where thrust exceeds drag at every speed in the solver
/// bracket, the speed is held at the bracket's upper end.
pub fn simulate_trajectory(
    robot: &DualAugerRobot,
    rpm: f64,
    uplift: &UpliftModel,
    duration_s: f64,
    dt_s: f64,
    opts: &SolverOptions,
) -> Result<Trajectory> {
    robot.validate()?;
    uplift.validate()?;
    if !(dt_s > 0.0) || !dt_s.is_finite() {
        return Err(Error::Argument(format!("dt must be > 0, got {dt_s}")));
    }
    if !(dt_s < duration_s) || !duration_s.is_finite() {
        return Err(Error::Argument(format!("dt ({dt_s} s) must be smaller than the duration ({duration_s} s)")));
    }
    if !(rpm >= 0.0) {
        return Err(Error::Argument(format!("rotation speed must be >= 0, got {rpm}")));
    }

    let surface = robot.front.radius_m();
    let steps = (duration_s / dt_s).ceil() as usize;
    let mut points = Vec::with_capacity(steps + 1);
    let mut state = TrajectoryPoint { t_s: 0.0, x_m: 0.0, z_m: robot.burial_depth_m, theta_deg: 90.0 };
    points.push(state);
    if state.z_m <= surface {
        return Ok(Trajectory { points, surfaced: true });
    }

    let mut saturated = false;
    for i in 1..=steps {
        let t_next = if i == steps { duration_s } else { i as f64 * dt_s };
        let h = t_next - state.t_s;

        let v_h = if rpm > 0.0 {
            match equilibrium_speed_at(robot, rpm, state.z_m, opts) {
                Ok(v) => v * 1e-3,
                // thrust beats drag at every speed this shallow; run at the bracket ceiling
                Err(Error::Bracket(_)) => {
                    if !saturated {
                        log::warn!("speed saturated at {} mm/s from depth {:.4} m", opts.bracket_mm_s.1, state.z_m);
                        saturated = true;
                    }
                    opts.bracket_mm_s.1 * 1e-3
                }
                Err(e) => return Err(e),
            }
        } else {
            0.0
        };
        let drifting = state.t_s >= uplift.onset_time_s && v_h > 0.0;
        let v_z = if drifting { -uplift.kappa * v_h } else { 0.0 };
        let theta = if drifting { uplift.tilted_theta_deg() } else { state.theta_deg };

        let z_next = state.z_m + v_z * h;
        if v_z < 0.0 && z_next <= surface {
            let frac = ((state.z_m - surface) / (-v_z * h)).clamp(0.0, 1.0);
            state = TrajectoryPoint {
                t_s: state.t_s + frac * h,
                x_m: state.x_m + v_h * frac * h,
                z_m: surface,
                theta_deg: theta,
            };
            points.push(state);
            return Ok(Trajectory { points, surfaced: true });
        }
        state = TrajectoryPoint { t_s: t_next, x_m: state.x_m + v_h * h, z_m: z_next, theta_deg: theta };
        points.push(state);
    }
    Ok(Trajectory { points, surfaced: false })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::granular::{ReductionCurve, StaticDragModel, ThrustCurve};
    use crate::robot::{ComponentShares, CurvePair};

    fn robot() -> DualAugerRobot {
        DualAugerRobot::with_model(
            ComponentShares::new(0.0, 20.0, 6.0).unwrap(),
            CurvePair {
                cw: ReductionCurve::new(0.03, 14.0, 0.5).unwrap(),
                ccw: ReductionCurve::new(0.98, 14.0, 0.5).unwrap(),
            },
            ThrustCurve::measured(),
            StaticDragModel::new(30.0, 1.0, 0.10).unwrap(),
        )
    }

    #[test]
    fn rejects_bad_steps() {
        let r = robot();
        let o = SolverOptions::default();
        assert!(simulate_trajectory(&r, 210.0, &UpliftModel::NONE, 10.0, 10.0, &o).is_err());
        assert!(simulate_trajectory(&r, 210.0, &UpliftModel::NONE, 10.0, 0.0, &o).is_err());
    }

    #[test]
    fn no_rotation_stays_put() {
        let r = robot();
        let uplift = UpliftModel { kappa: 0.25, onset_time_s: 0.0 };
        let tr = simulate_trajectory(&r, 0.0, &uplift, 100.0, 1.0, &SolverOptions::default()).unwrap();
        assert_eq!(tr.points.len(), 101);
        assert!(tr.points.iter().all(|p| p.x_m == 0.0 && p.z_m == 0.10 && p.theta_deg == 90.0));
        assert!(!tr.surfaced);
    }

    #[test]
    fn surfaces_exactly_at_radius() {
        let r = robot();
        let uplift = UpliftModel { kappa: 1.0, onset_time_s: 0.0 };
        let tr = simulate_trajectory(&r, 210.0, &uplift, 1e6, 5.0, &SolverOptions::default()).unwrap();
        assert!(tr.surfaced);
        assert_eq!(tr.last().z_m, 0.012);
        assert!(tr.points.windows(2).all(|w| w[1].t_s >= w[0].t_s));
    }
}
