use nalgebra::{DMatrix, DVector};

use super::dataset::{CalibrationPoint, Observation};
use super::nnls::nnls;
use super::reduction::diag_inverse;
use super::FitResult;
use crate::error::{Error, Result};
use crate::granular::{slip_velocity, AugerSpec, Rotation, RotationState};
use crate::robot::{ComponentShares, CurvePair};

fn eta_of(curves: &CurvePair, auger: &AugerSpec, rot: &RotationState, v_mm_s: f64) -> Result<f64> {
    match rot.effective_direction() {
        Rotation::Stopped => Ok(1.0),
        dir => {
            let lambda = slip_velocity(auger.outer_diameter_mm, rot.effective_rpm(), v_mm_s)?;
            curves.eta(auger, dir, lambda)
        }
    }
}

/// Coefficients `[1, η_front, η_back]` and observed force of one kinematic case.
pub fn case_row(
    point: &CalibrationPoint,
    curves: &CurvePair,
    front: &AugerSpec,
    back: &AugerSpec,
) -> Result<([f64; 3], f64)> {
    match &point.observation {
        Observation::KinematicCase { front: f, back: b, v_mm_s, force_n } => {
            Ok(([1.0, eta_of(curves, front, f, *v_mm_s)?, eta_of(curves, back, b, *v_mm_s)?], *force_n))
        }
        other => Err(Error::Data(format!("share fit given a non-case observation {other:?}"))),
    }
}

/// Static drag shares `(d_stator, d_front, d_back)` from whole-robot cases.
///
/// Each case is linear in the shares once the curves are fixed. Solved as
/// weighted nonnegative least squares; `sum_to` adds the equality constraint
/// `d_stator + d_front + d_back = sum_to`.
pub fn fit_component_shares(
    cases: &[CalibrationPoint],
    curves: &CurvePair,
    front: &AugerSpec,
    back: &AugerSpec,
    sum_to: Option<f64>,
) -> Result<(FitResult, ComponentShares)> {
    let mut rows = Vec::new();
    let mut targets = Vec::new();
    let mut weights = Vec::new();
    for p in cases {
        p.validate()?;
        if p.weight == 0.0 {
            continue;
        }
        let (row, force) = case_row(p, curves, front, back)?;
        let sw = p.weight.sqrt();
        rows.extend(row.iter().map(|c| c * sw));
        targets.push(force * sw);
        weights.push(p.weight);
    }
    let m = targets.len();
    if m < 3 {
        return Err(Error::Underdetermined(format!("3 drag shares but only {m} weighted case(s)")));
    }
    let a = DMatrix::from_row_slice(m, 3, &rows);
    let b = DVector::from_vec(targets);
    let x = nnls(&a, &b, sum_to)?;

    let r = &a * &x - &b;
    let total_w: f64 = weights.iter().sum();
    let g = a.transpose() * &r;
    // stationarity residual over the shares that are off their bound
    let free: Vec<usize> = (0..3).filter(|&i| x[i] > 0.0).collect();
    let shift = match (sum_to, free.is_empty()) {
        (Some(_), false) => free.iter().map(|&i| g[i]).sum::<f64>() / free.len() as f64,
        _ => 0.0,
    };
    let gradient_norm = free.iter().map(|&i| (g[i] - shift).powi(2)).sum::<f64>().sqrt();

    let shares = ComponentShares::new(x[0], x[1], x[2])?;
    let fit = FitResult {
        params: FitResult::named(&["d_stator_n", "d_front_n", "d_back_n"], x.as_slice()),
        rms_residual: (r.norm_squared() / total_w).sqrt(),
        iterations: 0,
        converged: true,
        gradient_norm,
        covariance_proxy: diag_inverse(&(a.transpose() * &a)),
        cost_history: vec![],
    };
    Ok((fit, shares))
}
