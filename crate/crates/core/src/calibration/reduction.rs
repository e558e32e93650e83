use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dataset::{CalibrationPoint, Observation};
use super::lm::{minimize, LeastSquares, LmOptions, LmReport};
use super::FitResult;
use crate::error::{Error, Result};
use crate::granular::ReductionCurve;

/// Starting values for `η∞`.
pub const START_ETA_INF: [f64; 4] = [0.0, 0.1, 0.2, 0.3];
/// Starting values for `λc`.
pub const START_LAMBDA_C: [f64; 3] = [5.0, 20.0, 80.0];
/// Starting values for `p`.
pub const START_P: [f64; 3] = [0.5, 1.0, 2.0];

/// Closed box for `(η∞, λc, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamBox {
    pub eta_inf: (f64, f64),
    pub lambda_c: (f64, f64),
    pub p: (f64, f64),
}

impl Default for ParamBox {
    fn default() -> Self {
        ParamBox { eta_inf: (0.0, 1.0 - 1e-9), lambda_c: (1e-6, 1e6), p: (1e-3, 20.0) }
    }
}

impl ParamBox {
    fn lower(&self) -> [f64; 3] {
        [self.eta_inf.0, self.lambda_c.0, self.p.0]
    }

    fn upper(&self) -> [f64; 3] {
        [self.eta_inf.1, self.lambda_c.1, self.p.1]
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.eta_inf.0 >= 0.0
            && self.eta_inf.1 < 1.0
            && self.lambda_c.0 > 0.0
            && self.p.0 > 0.0
            && self.eta_inf.0 <= self.eta_inf.1
            && self.lambda_c.0 <= self.lambda_c.1
            && self.p.0 <= self.p.1;
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid parameter box {self:?}")))
        }
    }

    /// The multi-start grid, clamped into the box, in grid-index order.
    pub fn start_grid(&self) -> Vec<[f64; 3]> {
        let (lo, hi) = (self.lower(), self.upper());
        let mut starts = Vec::with_capacity(36);
        for &e in &START_ETA_INF {
            for &l in &START_LAMBDA_C {
                for &p in &START_P {
                    let s = [e, l, p];
                    starts.push(std::array::from_fn(|i| s[i].clamp(lo[i], hi[i])));
                }
            }
        }
        starts
    }
}

struct ReductionProblem {
    lambda: Vec<f64>,
    eta: Vec<f64>,
    sqrt_w: Vec<f64>,
}

fn curve_at(x: &[f64]) -> ReductionCurve {
    ReductionCurve { eta_inf: x[0], lambda_c: x[1], p: x[2] }
}

impl LeastSquares for ReductionProblem {
    fn residuals(&self, x: &[f64]) -> DVector<f64> {
        let c = curve_at(x);
        DVector::from_iterator(
            self.lambda.len(),
            (0..self.lambda.len()).map(|i| self.sqrt_w[i] * (c.eval_unchecked(self.lambda[i]) - self.eta[i])),
        )
    }

    fn jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        let c = curve_at(x);
        let mut j = DMatrix::zeros(self.lambda.len(), 3);
        for i in 0..self.lambda.len() {
            let g = c.gradient(self.lambda[i]);
            for k in 0..3 {
                j[(i, k)] = self.sqrt_w[i] * g[k];
            }
        }
        j
    }
}

pub(crate) fn diag_inverse(m: &DMatrix<f64>) -> Vec<f64> {
    match m.clone().try_inverse() {
        Some(inv) => (0..m.nrows()).map(|i| inv[(i, i)]).collect(),
        None => vec![f64::INFINITY; m.nrows()],
    }
}

/// Fits `(η∞, λc, p)` to normalized drag readings.
///
/// Weighted least squares from every point of the fixed start grid; the best
/// converged start wins, ties going to the lower grid index.
pub fn fit_reduction_curve(points: &[CalibrationPoint], bounds: &ParamBox) -> Result<(FitResult, ReductionCurve)> {
    fit_reduction_curve_with(points, bounds, &LmOptions::default())
}

pub fn fit_reduction_curve_with(
    points: &[CalibrationPoint],
    bounds: &ParamBox,
    opts: &LmOptions,
) -> Result<(FitResult, ReductionCurve)> {
    bounds.validate()?;
    let mut problem = ReductionProblem { lambda: vec![], eta: vec![], sqrt_w: vec![] };
    for p in points {
        p.validate()?;
        match p.observation {
            Observation::Reduction { lambda, eta, .. } => {
                problem.lambda.push(lambda);
                problem.eta.push(eta);
                problem.sqrt_w.push(p.weight.sqrt());
            }
            _ => return Err(Error::Data("reduction fit given a non-reduction point".into())),
        }
    }
    let mut distinct: Vec<f64> =
        problem.lambda.iter().zip(&problem.sqrt_w).filter(|(_, w)| **w > 0.0).map(|(l, _)| *l).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::Underdetermined(format!(
            "reduction curve has 3 parameters but only {} distinct slip velocities",
            distinct.len()
        )));
    }
    let total_weight: f64 = problem.sqrt_w.iter().map(|w| w * w).sum();

    let (lo, hi) = (bounds.lower(), bounds.upper());
    let reports: Vec<LmReport> =
        bounds.start_grid().par_iter().map(|start| minimize(&problem, start, &lo, &hi, opts)).collect();

    let mut best: Option<&LmReport> = None;
    for rep in reports.iter().filter(|r| r.converged && r.cost.is_finite()) {
        if best.is_none_or(|b| rep.cost < b.cost) {
            best = Some(rep);
        }
    }
    let best = best.ok_or_else(|| {
        Error::NonConvergence(format!("no start of {} converged for the reduction curve", reports.len()))
    })?;

    let curve = ReductionCurve::new(best.params[0], best.params[1], best.params[2])?;
    let fit = FitResult {
        params: FitResult::named(&["eta_inf", "lambda_c", "p"], &best.params),
        rms_residual: (2.0 * best.cost / total_weight).sqrt(),
        iterations: best.iterations,
        converged: best.converged,
        gradient_norm: best.gradient_norm,
        covariance_proxy: diag_inverse(&best.normal_matrix),
        cost_history: best.cost_history.clone(),
    };
    Ok((fit, curve))
}

/// Which parameter an anchored fit solves for; the others come from a template.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnchorFree {
    /// Solve `η∞`, keep `λc` and `p`.
    Floor,
    /// Solve `λc`, keep `η∞` and `p`.
    Scale,
}

/// Passes a curve through one observation `(λ_a, η_a)` by solving one
/// parameter in closed form and borrowing the rest from `template`.
pub fn fit_anchored(
    lambda: f64,
    eta: f64,
    template: &ReductionCurve,
    free: AnchorFree,
) -> Result<(FitResult, ReductionCurve)> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::Data(format!("anchor slip velocity must be > 0, got {lambda}")));
    }
    let curve = match free {
        AnchorFree::Floor => {
            let g = template.decay(lambda);
            let eta_inf = (eta - g) / (1.0 - g);
            if !(0.0..1.0).contains(&eta_inf) {
                return Err(Error::Data(format!(
                    "anchor η = {eta} at λ = {lambda} needs a floor of {eta_inf}, outside [0, 1)"
                )));
            }
            ReductionCurve { eta_inf, ..*template }
        }
        AnchorFree::Scale => {
            let e = template.eta_inf;
            if !(eta > e && eta < 1.0) {
                return Err(Error::Data(format!("anchor η = {eta} must lie strictly between the floor {e} and 1")));
            }
            let ratio = (1.0 - e) / (eta - e) - 1.0;
            let lambda_c = lambda / ratio.powf(1.0 / template.p);
            ReductionCurve { lambda_c, ..*template }
        }
    };
    curve.validate()?;
    let fit = FitResult {
        params: FitResult::named(&["eta_inf", "lambda_c", "p"], &[curve.eta_inf, curve.lambda_c, curve.p]),
        rms_residual: (curve.eval_unchecked(lambda) - eta).abs(),
        iterations: 0,
        converged: true,
        gradient_norm: 0.0,
        covariance_proxy: vec![],
        cost_history: vec![],
    };
    Ok((fit, curve))
}
