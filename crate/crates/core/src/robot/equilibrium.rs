use serde::{Deserialize, Serialize};

use super::{component_drag, DualAugerRobot};
use crate::error::{Error, Result};

/// Bracket and tolerance for the thrust = drag root search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Search interval for the horizontal speed, mm/s.
    pub bracket_mm_s: (f64, f64),
    /// Accept `v` once `|drag(v) − thrust| ≤ tol·thrust`.
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { bracket_mm_s: (1e-9, 1e3), tol: 1e-10, max_iterations: 400 }
    }
}

/// Forward thrust of both augers turning at `rpm` in their advancing sense.
pub fn total_thrust(robot: &DualAugerRobot, rpm: f64) -> Result<f64> {
    let kin = robot.burrowing_kinematics(rpm, 1.0)?;
    Ok(robot.auger_thrust(&robot.front, &kin.front)? + robot.auger_thrust(&robot.back, &kin.back)?)
}

/// Drag at the burial depth as the translation speed goes to zero with both
/// augers turning at `rpm`: every rotating auger sits on its curve floor.
pub fn drag_floor(robot: &DualAugerRobot, rpm: f64) -> Result<f64> {
    drag_floor_at(robot, rpm, robot.burial_depth_m)
}

pub(crate) fn drag_floor_at(robot: &DualAugerRobot, rpm: f64, depth_m: f64) -> Result<f64> {
    let kin = robot.burrowing_kinematics(rpm, 1.0)?;
    Ok(robot.static_drag.depth_scale(depth_m)? * robot.reference_drag_floor(&kin))
}

/// Go/no-go: can the augers at `rpm` overcome the slowest-possible drag?
pub fn self_burrowing_predicate(robot: &DualAugerRobot, rpm: f64) -> bool {
    if !(rpm > 0.0) {
        return false;
    }
    match (total_thrust(robot, rpm), drag_floor(robot, rpm)) {
        (Ok(thrust), Ok(floor)) => thrust > 0.0 && thrust >= floor,
        _ => false,
    }
}

/// Horizontal speed at which drag balances thrust, at the burial depth.
pub fn equilibrium_speed(robot: &DualAugerRobot, rpm: f64, opts: &SolverOptions) -> Result<f64> {
    equilibrium_speed_at(robot, rpm, robot.burial_depth_m, opts)
}

/// Horizontal speed (mm/s) at which drag balances thrust at `depth_m`.
///
/// Bisects `drag(v) − thrust` on a logarithmic scale. Returns 0 when the drag
/// at the low end of the bracket already exceeds the thrust.
pub fn equilibrium_speed_at(robot: &DualAugerRobot, rpm: f64, depth_m: f64, opts: &SolverOptions) -> Result<f64> {
    let (v_lo, v_hi) = opts.bracket_mm_s;
    if !(v_lo > 0.0 && v_hi > v_lo && v_hi.is_finite()) {
        return Err(Error::Argument(format!("speed bracket must satisfy 0 < v_lo < v_hi, got ({v_lo}, {v_hi})")));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::Argument(format!("tolerance must be > 0, got {}", opts.tol)));
    }
    if !(rpm >= 0.0) {
        return Err(Error::Argument(format!("rotation speed must be >= 0, got {rpm}")));
    }
    if rpm == 0.0 {
        return Ok(0.0);
    }

    let thrust = total_thrust(robot, rpm)?;
    let residual = |v: f64| -> Result<f64> {
        let kin = robot.burrowing_kinematics(rpm, v)?;
        Ok(component_drag(robot, &kin, depth_m)? - thrust)
    };
    let accept = opts.tol * thrust;

    let (mut lo, mut hi) = (v_lo, v_hi);
    let mut r_lo = residual(lo)?;
    if r_lo > 0.0 {
        return Ok(0.0);
    }
    if r_lo.abs() <= accept {
        return Ok(lo);
    }
    let mut r_hi = residual(hi)?;
    if r_hi < 0.0 {
        return Err(Error::Bracket(format!("drag at {hi} mm/s is still below the thrust; increase v_hi")));
    }

    for _ in 0..opts.max_iterations {
        let mid = (lo * hi).sqrt();
        let r_mid = residual(mid)?;
        if r_mid < r_lo || r_mid > r_hi {
            return Err(Error::Model(format!("drag − thrust is not monotone in speed near {mid} mm/s")));
        }
        if r_mid.abs() <= accept || !(mid > lo && mid < hi) {
            return Ok(mid);
        }
        if r_mid < 0.0 {
            lo = mid;
            r_lo = r_mid;
        } else {
            hi = mid;
            r_hi = r_mid;
        }
    }
    Ok((lo * hi).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::granular::{ReductionCurve, StaticDragModel, ThrustCurve};
    use crate::robot::{ComponentShares, CurvePair, DualAugerRobot};

    fn robot(eta_inf: f64) -> DualAugerRobot {
        let cw = ReductionCurve::new(eta_inf, 14.0, 0.5).unwrap();
        DualAugerRobot::with_model(
            ComponentShares::new(0.0, 20.0, 6.0).unwrap(),
            CurvePair { cw, ccw: ReductionCurve::new(0.98, 14.0, 0.5).unwrap() },
            ThrustCurve::measured(),
            StaticDragModel::new(30.0, 1.0, 0.10).unwrap(),
        )
    }

    #[test]
    fn zero_rpm_never_burrows() {
        assert!(!self_burrowing_predicate(&robot(0.01), 0.0));
        assert_eq!(equilibrium_speed(&robot(0.01), 0.0, &SolverOptions::default()).unwrap(), 0.0);
    }

    #[test]
    fn high_floor_gives_zero_speed() {
        let r = robot(0.5);
        assert!(!self_burrowing_predicate(&r, 210.0));
        assert_eq!(equilibrium_speed(&r, 210.0, &SolverOptions::default()).unwrap(), 0.0);
    }

    #[test]
    fn root_balances_thrust() {
        let r = robot(0.02);
        let opts = SolverOptions::default();
        let v = equilibrium_speed(&r, 210.0, &opts).unwrap();
        assert!(v > 0.0);
        let kin = r.burrowing_kinematics(210.0, v).unwrap();
        let drag = component_drag(&r, &kin, r.burial_depth_m).unwrap();
        assert!((drag - 3.8).abs() <= 1e-9 * 3.8, "{drag}");
    }

    #[test]
    fn narrow_bracket_errors() {
        let r = robot(0.02);
        let opts = SolverOptions { bracket_mm_s: (1e-9, 1e-6), ..SolverOptions::default() };
        assert!(matches!(equilibrium_speed(&r, 210.0, &opts), Err(Error::Bracket(_))));
        let bad = SolverOptions { bracket_mm_s: (1.0, 0.5), ..SolverOptions::default() };
        assert!(matches!(equilibrium_speed(&r, 210.0, &bad), Err(Error::Argument(_))));
    }
}
