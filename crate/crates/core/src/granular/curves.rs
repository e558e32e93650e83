use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Linear interpolation through `knots` (sorted by x), clamped at both ends.
fn interpolate(knots: &[(f64, f64)], x: f64) -> f64 {
    let (first, last) = (knots[0], knots[knots.len() - 1]);
    if x <= first.0 {
        return first.1;
    }
    if x >= last.0 {
        return last.1;
    }
    let i = knots.partition_point(|k| k.0 <= x);
    let (x0, y0) = knots[i - 1];
    let (x1, y1) = knots[i];
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

/// Piecewise-linear thrust versus rotation speed.
///
/// The origin `(0 rpm, 0 N)` is implicit. Above the last knot the curve is
/// held constant: the drive cannot be characterised beyond its measured range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ThrustKnots", into = "ThrustKnots")]
pub struct ThrustCurve {
    // includes the origin
    knots: Vec<(f64, f64)>,
}

#[derive(Serialize, Deserialize)]
struct ThrustKnots {
    knots: Vec<(f64, f64)>,
}

impl TryFrom<ThrustKnots> for ThrustCurve {
    type Error = Error;

    fn try_from(k: ThrustKnots) -> Result<Self> {
        ThrustCurve::new(k.knots)
    }
}

impl From<ThrustCurve> for ThrustKnots {
    fn from(c: ThrustCurve) -> Self {
        ThrustKnots { knots: c.knots().to_vec() }
    }
}

impl ThrustCurve {
    /// Builds a curve from `(rpm, N)` knots, excluding the implicit origin.
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.is_empty() {
            return Err(Error::Data("thrust curve: ≥ 1 point required".into()));
        }
        let mut all = Vec::with_capacity(knots.len() + 1);
        all.push((0.0, 0.0));
        for &(rpm, thrust) in &knots {
            if !rpm.is_finite() || !thrust.is_finite() {
                return Err(Error::Data("thrust knots must be finite".into()));
            }
            let &(prev_rpm, prev_thrust) = all.last().unwrap();
            if rpm <= prev_rpm {
                return Err(Error::Data(format!(
                    "thrust knots must be strictly increasing in rpm and > 0 (got {rpm} after {prev_rpm})"
                )));
            }
            if thrust < prev_thrust {
                return Err(Error::Data(format!(
                    "thrust must be nondecreasing in rpm ({thrust} N at {rpm} rpm after {prev_thrust} N)"
                )));
            }
            all.push((rpm, thrust));
        }
        Ok(ThrustCurve { knots: all })
    }

    /// The measured robot thrust: 1.6 N, 3.4 N and 3.8 N at 105, 160 and 210 rpm.
    pub fn measured() -> Self {
        ThrustCurve::new(vec![(105.0, 1.6), (160.0, 3.4), (210.0, 3.8)]).unwrap()
    }

    /// Knots without the implicit origin.
    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots[1..]
    }

    pub fn max_rpm(&self) -> f64 {
        self.knots[self.knots.len() - 1].0
    }

    pub fn eval(&self, rpm: f64) -> Result<f64> {
        if !(rpm >= 0.0) {
            return Err(domain(format!("rotation speed must be >= 0, got {rpm}")));
        }
        Ok(interpolate(&self.knots, rpm))
    }
}

/// Thrust of `curve` at `rpm`.
pub fn thrust_force(curve: &ThrustCurve, rpm: f64) -> Result<f64> {
    curve.eval(rpm)
}

/// Sign attached to a torque curve, tied to the rotation direction it was measured in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TorqueSign {
    #[serde(rename = "+")]
    Positive,
    #[serde(rename = "-")]
    Negative,
}

/// User-configured torque magnitude versus slip velocity.
///
/// No default law exists; knots come from the user's own measurements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorqueCurve {
    knots: Vec<(f64, f64)>,
    sign: TorqueSign,
}

impl TorqueCurve {
    pub fn new(knots: Vec<(f64, f64)>, sign: TorqueSign) -> Result<Self> {
        if knots.is_empty() {
            return Err(Error::Config("torque curve has no knots".into()));
        }
        for w in knots.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::Config("torque knots must be strictly increasing in slip velocity".into()));
            }
        }
        if knots.iter().any(|k| !k.0.is_finite() || !k.1.is_finite() || k.0 < 0.0) {
            return Err(Error::Config("torque knots must be finite with λ >= 0".into()));
        }
        Ok(TorqueCurve { knots, sign })
    }

    pub fn sign(&self) -> TorqueSign {
        self.sign
    }

    pub fn eval(&self, lambda: f64) -> Result<f64> {
        if !(lambda >= 0.0) {
            return Err(domain(format!("slip velocity must be >= 0, got {lambda}")));
        }
        let magnitude = interpolate(&self.knots, lambda);
        Ok(match self.sign {
            TorqueSign::Positive => magnitude,
            TorqueSign::Negative => -magnitude,
        })
    }
}

/// Signed torque of `curve` at slip velocity `lambda`, N·m.
pub fn torque_estimate(curve: &TorqueCurve, lambda: f64) -> Result<f64> {
    curve.eval(lambda)
}
