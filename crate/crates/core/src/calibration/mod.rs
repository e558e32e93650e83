//! Parameter estimation from measured readings: reduction curves by bounded
//! Levenberg–Marquardt, component shares by nonnegative least squares, and
//! closed-form fits for thrust and static drag.

mod dataset;
mod lm;
mod nnls;
mod pipeline;
mod reduction;
mod shares;
mod simple;

use serde::{Deserialize, Serialize};

pub use dataset::{
    read_dataset, write_dataset, CalibrationPoint, CurveId, Dataset, Observation, DATASET_HEADER, OPT_IN_MARKER,
    PROVENANCE_COLUMN,
};
pub use lm::{minimize, LeastSquares, LmOptions, LmReport};
pub use nnls::nnls;
pub use pipeline::{
    calibrate, eta_inf_cap, Calibrated, CalibrationOptions, CalibrationReport, CaseResidual, CurveReport, CurveSource,
    CurveSpec, FitToken, Fittable, RobotSpec,
};
pub use reduction::{
    fit_anchored, fit_reduction_curve, fit_reduction_curve_with, AnchorFree, ParamBox, START_ETA_INF, START_LAMBDA_C,
    START_P,
};
pub use shares::{case_row, fit_component_shares};
pub use simple::{fit_static_drag, fit_thrust_curve, StaticFit};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedParam {
    pub name: String,
    pub value: f64,
}

/// Outcome of one fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub params: Vec<NamedParam>,
    /// Weighted root-mean-square residual, in data units.
    pub rms_residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub gradient_norm: f64,
    /// Diagonal of `(JᵀWJ)⁻¹` at the solution.
    pub covariance_proxy: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub cost_history: Vec<f64>,
}

impl FitResult {
    pub(crate) fn named(names: &[&str], values: &[f64]) -> Vec<NamedParam> {
        names.iter().zip(values).map(|(n, v)| NamedParam { name: (*n).to_string(), value: *v }).collect()
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.iter().find(|p| p.name == name).map(|p| p.value)
    }
}
