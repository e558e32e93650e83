//! End-to-end calibration of a robot model from a mixed dataset.
//!
//! Order matters: the static law sets the baseline, the advancing-rotation
//! curve is fitted next, component shares are fitted against it, and the
//! retracting-rotation curve is then either fitted directly or recovered
//! from a pair of cases that differ only in one auger's rotation.

use serde::{Deserialize, Serialize};

use super::dataset::{CalibrationPoint, CurveId, Dataset, Observation};
use super::reduction::{fit_anchored, fit_reduction_curve, AnchorFree, ParamBox};
use super::shares::{case_row, fit_component_shares};
use super::simple::{fit_static_drag, fit_thrust_curve, StaticFit};
use super::FitResult;
use crate::error::{Error, Result};
use crate::granular::{
    slip_velocity, AugerSpec, Handedness, ReductionCurve, Rotation, RotationState, StaticDragModel, ThrustCurve,
};
use crate::robot::{ComponentShares, CurvePair, DualAugerRobot, ThrustBasis};

/// Largest `η` a retracting-rotation anchor may take.
const RETRACT_ETA_CEILING: f64 = 0.99;

/// The literal `"fit"` in a configuration file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitToken {
    Fit,
}

/// A model parameter that is either given or left for calibration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Fittable<T> {
    Fit(FitToken),
    Value(T),
}

impl<T> Fittable<T> {
    pub const FIT: Fittable<T> = Fittable::Fit(FitToken::Fit);

    pub fn value(&self) -> Option<&T> {
        match self {
            Fittable::Value(v) => Some(v),
            Fittable::Fit(_) => None,
        }
    }

    pub fn is_fit(&self) -> bool {
        matches!(self, Fittable::Fit(_))
    }

    fn require(&self, what: &str) -> Result<&T> {
        self.value().ok_or_else(|| Error::Config(format!("model uncalibrated: {what} is \"fit\"; run calibrate first")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSpec {
    pub cw: Fittable<ReductionCurve>,
    pub ccw: Fittable<ReductionCurve>,
}

impl CurveSpec {
    pub const FIT: CurveSpec = CurveSpec { cw: Fittable::FIT, ccw: Fittable::FIT };

    pub fn pair(&self, what: &str) -> Result<CurvePair> {
        Ok(CurvePair { cw: *self.cw.require(&format!("{what}.cw"))?, ccw: *self.ccw.require(&format!("{what}.ccw"))? })
    }
}

/// Robot description with any subset of its force parameters left to fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobotSpec {
    pub front: AugerSpec,
    pub back: AugerSpec,
    pub stator_dims_mm: [f64; 3],
    pub burial_depth_m: f64,
    pub marker_a_height_m: f64,
    pub marker_b_height_m: f64,
    pub mast_length_m: f64,
    #[serde(default)]
    pub thrust_basis: ThrustBasis,
    pub shares: Fittable<ComponentShares>,
    /// Curves for horizontal travel.
    pub curves: CurveSpec,
    /// Curves for vertical penetration; informational, not used by the robot.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertical_curves: Option<CurveSpec>,
    pub thrust: Fittable<ThrustCurve>,
}

impl RobotSpec {
    /// The built robot with every force parameter left to fit.
    pub fn unfitted() -> Self {
        let unit = ReductionCurve { eta_inf: 0.0, lambda_c: 1.0, p: 1.0 };
        let geometry = DualAugerRobot::with_model(
            ComponentShares { stator: 0.0, front: 0.0, back: 0.0 },
            CurvePair { cw: unit, ccw: unit },
            ThrustCurve::measured(),
            StaticDragModel { k: 0.0, alpha: 1.0, reference_depth: 0.1 },
        );
        RobotSpec {
            front: geometry.front,
            back: geometry.back,
            stator_dims_mm: geometry.stator_dims_mm,
            burial_depth_m: geometry.burial_depth_m,
            marker_a_height_m: geometry.marker_a_height_m,
            marker_b_height_m: geometry.marker_b_height_m,
            mast_length_m: geometry.mast_length_m,
            thrust_basis: geometry.thrust_basis,
            shares: Fittable::FIT,
            curves: CurveSpec::FIT,
            vertical_curves: Some(CurveSpec::FIT),
            thrust: Fittable::FIT,
        }
    }

    /// The robot, once every parameter has a value.
    pub fn build(&self, static_drag: &Fittable<StaticDragModel>) -> Result<DualAugerRobot> {
        let robot = DualAugerRobot {
            front: self.front,
            back: self.back,
            stator_dims_mm: self.stator_dims_mm,
            burial_depth_m: self.burial_depth_m,
            marker_a_height_m: self.marker_a_height_m,
            marker_b_height_m: self.marker_b_height_m,
            mast_length_m: self.mast_length_m,
            shares: *self.shares.require("robot.shares")?,
            curves: self.curves.pair("robot.curves")?,
            thrust: self.thrust.require("robot.thrust")?.clone(),
            thrust_basis: self.thrust_basis,
            static_drag: *static_drag.require("medium.static_drag")?,
        };
        robot.validate()?;
        Ok(robot)
    }

    fn thrust_multiplier(&self) -> f64 {
        match self.thrust_basis {
            ThrustBasis::WholeRobot => 1.0,
            ThrustBasis::PerAuger => 2.0,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CalibrationOptions {
    /// Admit reduction rows marked opt-in.
    pub include_opt_in: bool,
    /// A speed at which the robot is known to burrow. Caps the advancing
    /// curve's floor so the fitted model reproduces that observation.
    pub observed_burrowing_rpm: Option<f64>,
    pub bounds: ParamBox,
    /// Force the shares to sum to the static drag at the burial depth.
    pub constrain_share_sum: bool,
}

/// How a reduction curve was obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum CurveSource {
    Given,
    LeastSquares {
        points: usize,
    },
    Anchored {
        lambda: f64,
        eta: f64,
        solved: AnchorFree,
        template: ReductionCurve,
    },
    /// Anchor recovered from two cases differing only in one auger's rotation.
    CaseDifference {
        lambda: f64,
        eta: f64,
        clamped: bool,
        template: ReductionCurve,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveReport {
    pub curve: CurveId,
    pub source: CurveSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitResult>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub provenance: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseResidual {
    pub front: String,
    pub back: String,
    pub v_mm_s: f64,
    pub observed_n: f64,
    pub predicted_n: f64,
    pub residual_n: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub static_drag: Option<StaticFit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta_inf_cap: Option<f64>,
    pub curves: Vec<CurveReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shares: Option<FitResult>,
    pub cases: Vec<CaseResidual>,
    pub notes: Vec<String>,
}

impl CalibrationReport {
    pub fn curve(&self, id: CurveId) -> Option<&CurveReport> {
        self.curves.iter().find(|c| c.curve == id)
    }

    /// Root-mean-square case residual over cases with some auger turning.
    pub fn rotating_case_rms(&self) -> Option<f64> {
        let r: Vec<f64> =
            self.cases.iter().filter(|c| c.front != "stopped" || c.back != "stopped").map(|c| c.residual_n).collect();
        (!r.is_empty()).then(|| (r.iter().map(|x| x * x).sum::<f64>() / r.len() as f64).sqrt())
    }
}

/// A fully resolved model and how it was obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibrated {
    pub static_drag: StaticDragModel,
    pub robot: RobotSpec,
    pub report: CalibrationReport,
}

/// Upper bound on the advancing curve's floor implied by burrowing at
/// `total_thrust_n` against `static_drag_n`: with every share at its floor
/// the drag cannot exceed the thrust.
pub fn eta_inf_cap(total_thrust_n: f64, static_drag_n: f64) -> f64 {
    if static_drag_n > 0.0 {
        total_thrust_n / static_drag_n
    } else {
        f64::INFINITY
    }
}

fn provenance_of(points: &[CalibrationPoint]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for p in points {
        if let Some(s) = &p.provenance {
            if !out.contains(s) {
                out.push(s.clone());
            }
        }
    }
    out
}

fn distinct_lambda(points: &[CalibrationPoint]) -> Vec<(f64, f64)> {
    let mut seen: Vec<(f64, f64)> = Vec::new();
    for p in points {
        if let Observation::Reduction { lambda, eta, .. } = p.observation {
            if p.weight > 0.0 && !seen.iter().any(|(l, _)| *l == lambda) {
                seen.push((lambda, eta));
            }
        }
    }
    seen
}

/// Full fit with three or more slip velocities, a one-parameter anchor with one.
fn fit_curve(
    id: CurveId,
    points: &[CalibrationPoint],
    bounds: &ParamBox,
    template: Option<(ReductionCurve, AnchorFree)>,
) -> Result<(ReductionCurve, CurveReport)> {
    let distinct = distinct_lambda(points);
    let provenance = provenance_of(points);
    match (distinct.len(), template) {
        (n, _) if n >= 3 => {
            let (fit, curve) = fit_reduction_curve(points, bounds)?;
            let source = CurveSource::LeastSquares { points: points.len() };
            Ok((curve, CurveReport { curve: id, source, fit: Some(fit), provenance }))
        }
        (1, Some((template, solved))) => {
            let same: Vec<f64> = points
                .iter()
                .filter_map(|p| match p.observation {
                    Observation::Reduction { lambda, eta, .. } if p.weight > 0.0 && lambda == distinct[0].0 => {
                        Some(eta)
                    }
                    _ => None,
                })
                .collect();
            let lambda = distinct[0].0;
            let eta = same.iter().sum::<f64>() / same.len() as f64;
            let (fit, curve) = fit_anchored(lambda, eta, &template, solved)?;
            let source = CurveSource::Anchored { lambda, eta, solved, template };
            Ok((curve, CurveReport { curve: id, source, fit: Some(fit), provenance }))
        }
        (n, _) => Err(Error::Underdetermined(format!(
            "{id}: {n} distinct slip velocities; need >= 3{}",
            if template.is_some() { " or exactly 1" } else { "" }
        ))),
    }
}

fn as_right_handed(auger: &AugerSpec, rot: &RotationState) -> Rotation {
    let d = rot.effective_direction();
    match auger.handedness {
        Handedness::Right => d,
        Handedness::Left => d.mirrored(),
    }
}

fn uses_retracting_curve(p: &CalibrationPoint, spec: &RobotSpec) -> bool {
    match &p.observation {
        Observation::KinematicCase { front, back, .. } => {
            as_right_handed(&spec.front, front) == Rotation::Ccw || as_right_handed(&spec.back, back) == Rotation::Ccw
        }
        _ => false,
    }
}

fn rotation_label(r: &RotationState) -> String {
    match r.effective_direction() {
        Rotation::Stopped => "stopped".into(),
        d => format!("{}:{}", d.as_str(), r.rpm),
    }
}

/// First pair of cases that differ only in one auger turning in reverse
/// versus standing still. Returns `(λ, η_observed, auger share)`.
fn difference_anchor(cases: &[CalibrationPoint], spec: &RobotSpec, shares: &ComponentShares) -> Option<(f64, f64)> {
    for a in cases {
        let Observation::KinematicCase { front: fa, back: ba, v_mm_s: va, force_n: f_a } = a.observation else {
            continue;
        };
        for b in cases {
            let Observation::KinematicCase { front: fb, back: bb, v_mm_s: vb, force_n: f_b } = b.observation else {
                continue;
            };
            if va != vb {
                continue;
            }
            let stopped = |r: &RotationState| r.effective_direction() == Rotation::Stopped;
            // back auger reversed in `a`, stopped in `b`, front identical
            if fa == fb && as_right_handed(&spec.back, &ba) == Rotation::Ccw && stopped(&bb) && shares.back > 0.0 {
                let lambda = slip_velocity(spec.back.outer_diameter_mm, ba.effective_rpm(), va).ok()?;
                return Some((lambda, 1.0 + (f_a - f_b) / shares.back));
            }
            if ba == bb && as_right_handed(&spec.front, &fa) == Rotation::Ccw && stopped(&fb) && shares.front > 0.0 {
                let lambda = slip_velocity(spec.front.outer_diameter_mm, fa.effective_rpm(), va).ok()?;
                return Some((lambda, 1.0 + (f_a - f_b) / shares.front));
            }
        }
    }
    None
}

/// Resolves every `"fit"` entry of `spec` and `static_spec` from `data`.
pub fn calibrate(
    static_spec: &Fittable<StaticDragModel>,
    spec: &RobotSpec,
    data: &Dataset,
    opts: &CalibrationOptions,
) -> Result<Calibrated> {
    opts.bounds.validate()?;
    let mut report = CalibrationReport::default();
    let is_static = |o: &Observation| matches!(o, Observation::Static { .. });
    let is_thrust = |o: &Observation| matches!(o, Observation::Thrust { .. });
    let is_case = |o: &Observation| matches!(o, Observation::KinematicCase { .. });

    let static_drag = match static_spec {
        Fittable::Value(m) => *m,
        Fittable::Fit(_) => {
            let pts = data.of_kind(is_static);
            if pts.is_empty() {
                return Err(Error::Underdetermined("static drag is \"fit\" but the dataset has no static rows".into()));
            }
            let fit = fit_static_drag(&pts, spec.burial_depth_m)?;
            report.static_drag = Some(fit);
            fit.model
        }
    };
    let static_total = static_drag.resistance(spec.burial_depth_m)?;

    let thrust = match &spec.thrust {
        Fittable::Value(c) => c.clone(),
        Fittable::Fit(_) => fit_thrust_curve(&data.of_kind(is_thrust))?,
    };

    let cw = match &spec.curves.cw {
        Fittable::Value(c) => *c,
        Fittable::Fit(_) => {
            let mut bounds = opts.bounds;
            if let Some(rpm) = opts.observed_burrowing_rpm {
                let cap = eta_inf_cap(thrust.eval(rpm)? * spec.thrust_multiplier(), static_total);
                if cap < bounds.eta_inf.0 {
                    return Err(Error::Config(format!(
                        "burrowing at {rpm} rpm needs a curve floor <= {cap}, below the lower bound {}",
                        bounds.eta_inf.0
                    )));
                }
                if cap < bounds.eta_inf.1 {
                    bounds.eta_inf.1 = cap;
                    report.eta_inf_cap = Some(cap);
                }
            }
            let pts = data.reduction_points(CurveId::HorizontalCw, opts.include_opt_in);
            let (curve, rep) = fit_curve(CurveId::HorizontalCw, &pts, &bounds, None)?;
            report.curves.push(rep);
            curve
        }
    };

    let cases = data.of_kind(is_case);
    let sum_to = opts.constrain_share_sum.then_some(static_total);

    // first pass without cases that need the reversed-rotation curve
    let mut shares = match &spec.shares {
        Fittable::Value(s) => *s,
        Fittable::Fit(_) => {
            let provisional = CurvePair { cw, ccw: spec.curves.ccw.value().copied().unwrap_or(cw) };
            let usable: Vec<CalibrationPoint> = if spec.curves.ccw.is_fit() {
                cases.iter().filter(|p| !uses_retracting_curve(p, spec)).cloned().collect()
            } else {
                cases.clone()
            };
            let (fit, s) = fit_component_shares(&usable, &provisional, &spec.front, &spec.back, sum_to)?;
            report.shares = Some(fit);
            s
        }
    };

    let ccw = match &spec.curves.ccw {
        Fittable::Value(c) => *c,
        Fittable::Fit(_) => {
            let pts = data.reduction_points(CurveId::HorizontalCcw, opts.include_opt_in);
            if !pts.is_empty() {
                let (curve, rep) =
                    fit_curve(CurveId::HorizontalCcw, &pts, &opts.bounds, Some((cw, AnchorFree::Floor)))?;
                report.curves.push(rep);
                curve
            } else {
                let (lambda, raw) = difference_anchor(&cases, spec, &shares).ok_or_else(|| {
                    Error::Underdetermined(
                        "horizontal_ccw: no reduction rows and no pair of cases isolating a reversed auger".into(),
                    )
                })?;
                let clamped = raw > RETRACT_ETA_CEILING;
                let eta = raw.min(RETRACT_ETA_CEILING);
                if clamped {
                    report.notes.push(format!(
                        "horizontal_ccw: case difference implies η = {raw:.4} at λ = {lambda:.2}; held at {RETRACT_ETA_CEILING}"
                    ));
                }
                let (fit, curve) = fit_anchored(lambda, eta, &cw, AnchorFree::Floor)?;
                let provenance = provenance_of(
                    &cases.iter().filter(|p| uses_retracting_curve(p, spec)).cloned().collect::<Vec<_>>(),
                );
                report.curves.push(CurveReport {
                    curve: CurveId::HorizontalCcw,
                    source: CurveSource::CaseDifference { lambda, eta, clamped, template: cw },
                    fit: Some(fit),
                    provenance,
                });
                curve
            }
        }
    };
    let pair = CurvePair { cw, ccw };

    // second pass with every case now that both curves exist
    if spec.shares.is_fit() && spec.curves.ccw.is_fit() && cases.iter().any(|p| uses_retracting_curve(p, spec)) {
        let (fit, s) = fit_component_shares(&cases, &pair, &spec.front, &spec.back, sum_to)?;
        report.shares = Some(fit);
        shares = s;
    }

    let vertical_curves = match &spec.vertical_curves {
        None => None,
        Some(v) => {
            let vcw = match &v.cw {
                Fittable::Value(c) => *c,
                Fittable::Fit(_) => {
                    let pts = data.reduction_points(CurveId::VerticalCw, opts.include_opt_in);
                    let template = ReductionCurve { eta_inf: 0.0, ..cw };
                    let (curve, rep) =
                        fit_curve(CurveId::VerticalCw, &pts, &opts.bounds, Some((template, AnchorFree::Scale)))?;
                    report.curves.push(rep);
                    curve
                }
            };
            let vccw = match &v.ccw {
                Fittable::Value(c) => *c,
                Fittable::Fit(_) => {
                    let pts = data.reduction_points(CurveId::VerticalCcw, opts.include_opt_in);
                    let (curve, rep) =
                        fit_curve(CurveId::VerticalCcw, &pts, &opts.bounds, Some((vcw, AnchorFree::Floor)))?;
                    report.curves.push(rep);
                    curve
                }
            };
            Some(CurveSpec { cw: Fittable::Value(vcw), ccw: Fittable::Value(vccw) })
        }
    };

    for p in &cases {
        let (row, observed) = case_row(p, &pair, &spec.front, &spec.back)?;
        let predicted = row[0] * shares.stator + row[1] * shares.front + row[2] * shares.back;
        let Observation::KinematicCase { front, back, v_mm_s, .. } = p.observation else { unreachable!() };
        report.cases.push(CaseResidual {
            front: rotation_label(&front),
            back: rotation_label(&back),
            v_mm_s,
            observed_n: observed,
            predicted_n: predicted,
            residual_n: predicted - observed,
            provenance: p.provenance.clone(),
        });
    }
    for c in &report.curves {
        if let Some(f) = &c.fit {
            log::info!("{}: rms {:.3e} after {} iterations", c.curve, f.rms_residual, f.iterations);
        }
    }

    let robot = RobotSpec {
        shares: Fittable::Value(shares),
        curves: CurveSpec { cw: Fittable::Value(cw), ccw: Fittable::Value(ccw) },
        vertical_curves,
        thrust: Fittable::Value(thrust),
        ..spec.clone()
    };
    // surfaces any inconsistency in the resolved model now rather than at use
    robot.build(&Fittable::Value(static_drag))?;
    Ok(Calibrated { static_drag, robot, report })
}
