use serde::{Deserialize, Serialize};

use super::DualAugerRobot;
use crate::dataio::MarkerTrack;
use crate::error::{Error, Result};

/// Angle between the segment `a → b` and the horizontal ground line, degrees.
///
/// Points are `(horizontal, vertical-up)`. The result lies in `[0°, 180°)`;
/// an upright mast gives 90°.
pub fn inclination_from_markers(a: (f64, f64), b: (f64, f64)) -> Result<f64> {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    if dx == 0.0 && dy == 0.0 {
        return Err(Error::Degenerate("markers A and B coincide".into()));
    }
    let angle = dy.atan2(dx).to_degrees();
    Ok(angle.rem_euclid(180.0))
}

/// Robot motion recovered from the two mast markers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkerMotion {
    pub t_s: Vec<f64>,
    /// Marker A displacement from its first sample, m.
    pub dx_m: Vec<f64>,
    pub dy_m: Vec<f64>,
    /// Robot body position: marker A moved down the mast by its mounting height.
    pub body_x_m: Vec<f64>,
    pub body_y_m: Vec<f64>,
    pub theta_deg: Vec<f64>,
}

/// Turns time-aligned marker A and B tracks into displacement, body
/// position and inclination series.
pub fn marker_track_to_motion(
    track_a: &MarkerTrack,
    track_b: &MarkerTrack,
    robot: &DualAugerRobot,
) -> Result<MarkerMotion> {
    if track_a.len() < 2 || track_b.len() < 2 {
        return Err(Error::Data("marker tracks need at least 2 samples".into()));
    }
    if track_a.t != track_b.t {
        return Err(Error::Alignment("marker A and B timestamps differ".into()));
    }
    let n = track_a.len();
    let (x0, y0) = (track_a.u[0], track_a.v[0]);
    let mut motion = MarkerMotion {
        t_s: track_a.t.clone(),
        dx_m: Vec::with_capacity(n),
        dy_m: Vec::with_capacity(n),
        body_x_m: Vec::with_capacity(n),
        body_y_m: Vec::with_capacity(n),
        theta_deg: Vec::with_capacity(n),
    };
    for i in 0..n {
        let a = (track_a.u[i], track_a.v[i]);
        let b = (track_b.u[i], track_b.v[i]);
        let theta = inclination_from_markers(a, b)?;
        let (ux, uy) = (b.0 - a.0, b.1 - a.1);
        let len = ux.hypot(uy);
        motion.dx_m.push(a.0 - x0);
        motion.dy_m.push(a.1 - y0);
        motion.body_x_m.push(a.0 - robot.marker_a_height_m * ux / len);
        motion.body_y_m.push(a.1 - robot.marker_a_height_m * uy / len);
        motion.theta_deg.push(theta);
    }
    Ok(motion)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inclination_examples() {
        assert!((inclination_from_markers((0.0, 0.115), (0.0, 0.135)).unwrap() - 90.0).abs() < 1e-12);
        assert!((inclination_from_markers((0.0, 0.115), (0.02, 0.135)).unwrap() - 45.0).abs() < 1e-9);
        assert_eq!(inclination_from_markers((0.0, 0.135), (0.02, 0.135)).unwrap(), 0.0);
        assert_eq!(inclination_from_markers((0.02, 0.135), (0.0, 0.135)).unwrap(), 0.0);
        assert!(matches!(inclination_from_markers((0.1, 0.1), (0.1, 0.1)), Err(Error::Degenerate(_))));
    }
}
