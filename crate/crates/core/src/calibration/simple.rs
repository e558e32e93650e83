use serde::{Deserialize, Serialize};

use super::dataset::{CalibrationPoint, Observation};
use crate::error::{Error, Result};
use crate::granular::{StaticDragModel, ThrustCurve};

/// Thrust curve through the measured points, sorted by rpm.
///
/// Repeated rpm values must agree exactly. A point at 0 rpm must read 0 N and
/// is folded into the implicit origin.
pub fn fit_thrust_curve(points: &[CalibrationPoint]) -> Result<ThrustCurve> {
    let mut knots: Vec<(f64, f64)> = Vec::with_capacity(points.len());
    for p in points {
        p.validate()?;
        match p.observation {
            Observation::Thrust { rpm, thrust_n } => knots.push((rpm, thrust_n)),
            ref other => return Err(Error::Data(format!("thrust fit given {other:?}"))),
        }
    }
    knots.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut unique: Vec<(f64, f64)> = Vec::with_capacity(knots.len());
    for (rpm, thrust) in knots {
        if rpm < 0.0 {
            return Err(Error::Data(format!("thrust point at negative rpm {rpm}")));
        }
        if rpm == 0.0 {
            if thrust != 0.0 {
                return Err(Error::Data(format!("thrust at 0 rpm must be 0, got {thrust}")));
            }
            continue;
        }
        match unique.last() {
            Some(&(r, t)) if r == rpm => {
                if t != thrust {
                    return Err(Error::Data(format!("conflicting thrust at {rpm} rpm: {t} N and {thrust} N")));
                }
            }
            _ => unique.push((rpm, thrust)),
        }
    }
    ThrustCurve::new(unique)
}

/// Fitted depth law plus the rate-independence check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StaticFit {
    pub model: StaticDragModel,
    /// Largest force range among readings at one depth, N.
    pub rate_spread_n: f64,
    pub depth_count: usize,
}

/// Static drag law from drag readings without rotation.
///
/// `k` is the mean reading at `reference_depth_m`. With two or more depths the
/// exponent comes from a log-log regression, and `k` falls back to the
/// regression value when no reading sits at the reference depth. With one
/// depth the exponent stays at its default.
pub fn fit_static_drag(points: &[CalibrationPoint], reference_depth_m: f64) -> Result<StaticFit> {
    if !(reference_depth_m > 0.0) || !reference_depth_m.is_finite() {
        return Err(Error::Config(format!("reference depth must be > 0, got {reference_depth_m}")));
    }
    let mut groups: Vec<(f64, Vec<f64>)> = Vec::new();
    for p in points {
        p.validate()?;
        let Observation::Static { depth_m, force_n, .. } = p.observation else {
            return Err(Error::Data(format!("static fit given {:?}", p.observation)));
        };
        if force_n < 0.0 {
            return Err(Error::Data(format!("negative static drag {force_n} N")));
        }
        if !(depth_m > 0.0) {
            return Err(Error::Data(format!("static drag depth must be > 0, got {depth_m}")));
        }
        match groups.iter_mut().find(|(d, _)| *d == depth_m) {
            Some((_, f)) => f.push(force_n),
            None => groups.push((depth_m, vec![force_n])),
        }
    }
    if groups.is_empty() {
        return Err(Error::Underdetermined("static drag needs >= 1 reading".into()));
    }
    groups.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mean = |f: &[f64]| f.iter().sum::<f64>() / f.len() as f64;
    let rate_spread_n = groups
        .iter()
        .map(|(_, f)| f.iter().cloned().fold(f64::MIN, f64::max) - f.iter().cloned().fold(f64::MAX, f64::min))
        .fold(0.0, f64::max);

    let at_ref = groups.iter().find(|(d, _)| *d == reference_depth_m).map(|(_, f)| mean(f));
    let (k, alpha) = if groups.len() == 1 {
        let (d, f) = &groups[0];
        let alpha = StaticDragModel::DEFAULT_ALPHA;
        (at_ref.unwrap_or_else(|| mean(f) * (reference_depth_m / d).powf(alpha)), alpha)
    } else {
        // ordinary least squares of ln F on ln(z / z_ref), one point per depth
        let mut xs = Vec::with_capacity(groups.len());
        let mut ys = Vec::with_capacity(groups.len());
        for (d, f) in &groups {
            let m = mean(f);
            if !(m > 0.0) {
                return Err(Error::Data(format!("zero mean drag at {d} m cannot enter a log fit")));
            }
            xs.push((d / reference_depth_m).ln());
            ys.push(m.ln());
        }
        let n = xs.len() as f64;
        let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        let alpha = sxy / sxx;
        (at_ref.unwrap_or_else(|| (my - alpha * mx).exp()), alpha)
    };
    Ok(StaticFit {
        model: StaticDragModel::new(k, alpha, reference_depth_m)?,
        rate_spread_n,
        depth_count: groups.len(),
    })
}
