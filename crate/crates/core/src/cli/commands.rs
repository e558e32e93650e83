use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calibration::{calibrate, read_dataset, Dataset, Fittable};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::granular::slip_velocity;
use crate::robot::{
    drag_floor, equilibrium_speed, net_axial_force, self_burrowing_predicate, simulate_trajectory, total_thrust,
    DualAugerRobot, SolverOptions, Trajectory,
};

/// Fixed-point rendering with `digits` significant digits.
pub fn format_significant(x: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if x == 0.0 || !x.is_finite() {
        return format!("{:.*}", digits - 1, x);
    }
    let decimals = |mag: i32| (digits as i32 - 1 - mag).max(0) as usize;
    let mag = x.abs().log10().floor() as i32;
    let s = format!("{:.*}", decimals(mag), x);
    // rounding may carry into a new leading digit, e.g. 9.9996 -> 10.000
    let rounded: f64 = s.parse().unwrap_or(x);
    let new_mag = rounded.abs().log10().floor() as i32;
    if new_mag > mag {
        format!("{:.*}", decimals(new_mag), x)
    } else {
        s
    }
}

/// Digits carried by numeric CSV output.
pub const CSV_DIGITS: usize = 9;

fn csv_number(x: f64) -> String {
    format_significant(x, CSV_DIGITS)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

pub(super) fn slip<W: Write>(diameter: f64, rpm: f64, speed: f64, out: &mut W) -> Result<()> {
    let lambda = slip_velocity(diameter, rpm, speed)?;
    writeln!(out, "{}", format_significant(lambda, 4))?;
    Ok(())
}

/// Resolves every `"fit"` entry of `cfg` and attaches the fit report.
pub fn run_calibrate(cfg: &RunConfig, data: &Dataset) -> Result<RunConfig> {
    let fitted = calibrate(&cfg.medium.static_drag, &cfg.robot, data, &cfg.calibration)?;
    let mut out = cfg.clone();
    out.medium.static_drag = Fittable::Value(fitted.static_drag);
    out.robot = fitted.robot;
    out.fit_report = Some(fitted.report);
    Ok(out)
}

pub(super) fn calibrate_cmd<W: Write>(config: &Path, data: &Path, out_path: &Path, out: &mut W) -> Result<()> {
    let cfg = RunConfig::load(config)?;
    let file = File::open(data).map_err(|e| Error::Data(format!("cannot read {}: {e}", data.display())))?;
    let dataset = read_dataset(file)?;
    let fitted = run_calibrate(&cfg, &dataset)?;
    let mut sink = create(out_path)?;
    sink.write_all(fitted.to_json()?.as_bytes())?;
    sink.flush()?;

    let robot = fitted.robot()?;
    let curve = robot.curves.cw;
    writeln!(out, "advancing curve: eta_inf={:.4} lambda_c={:.4} p={:.4}", curve.eta_inf, curve.lambda_c, curve.p)?;
    let s = robot.shares;
    writeln!(out, "shares: stator={:.3} N front={:.3} N back={:.3} N", s.stator, s.front, s.back)?;
    writeln!(out, "wrote {}", out_path.display())?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub burrows: bool,
    pub thrust_n: f64,
    pub drag_floor_n: f64,
    pub v_star_mm_s: f64,
}

pub fn predict(robot: &DualAugerRobot, rpm: f64, opts: &SolverOptions) -> Result<Prediction> {
    if !(rpm >= 0.0) || !rpm.is_finite() {
        return Err(Error::Argument(format!("--rpm must be >= 0, got {rpm}")));
    }
    Ok(Prediction {
        burrows: self_burrowing_predicate(robot, rpm),
        thrust_n: total_thrust(robot, rpm)?,
        drag_floor_n: drag_floor(robot, rpm)?,
        v_star_mm_s: equilibrium_speed(robot, rpm, opts)?,
    })
}

pub(super) fn predict_cmd<W: Write>(config: &Path, rpm: f64, out: &mut W) -> Result<()> {
    let cfg = RunConfig::load(config)?;
    let robot = cfg.robot()?;
    let p = predict(&robot, rpm, &cfg.solver_options())?;
    writeln!(out, "{}", serde_json::to_string_pretty(&p)?)?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationSummary {
    pub final_t_s: f64,
    pub final_x_m: f64,
    pub final_z_m: f64,
    pub rise_m: f64,
    pub surfaced: bool,
}

pub fn simulate(cfg: &RunConfig, rpm: f64, duration_s: Option<f64>, dt_s: Option<f64>) -> Result<Trajectory> {
    let robot = cfg.robot()?;
    simulate_trajectory(
        &robot,
        rpm,
        &cfg.uplift,
        duration_s.unwrap_or(cfg.numeric.duration_s),
        dt_s.unwrap_or(cfg.numeric.dt_s),
        &cfg.solver_options(),
    )
}

pub(super) fn simulate_cmd<W: Write>(
    config: &Path,
    rpm: f64,
    duration_s: Option<f64>,
    dt_s: Option<f64>,
    out_path: &Path,
    out: &mut W,
) -> Result<()> {
    let cfg = RunConfig::load(config)?;
    let traj = simulate(&cfg, rpm, duration_s, dt_s)?;
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(create(out_path)?);
    w.write_record(["t_s", "x_m", "z_m", "theta_deg"])?;
    for p in &traj.points {
        w.write_record([p.t_s, p.x_m, p.z_m, p.theta_deg].map(csv_number))?;
    }
    w.flush()?;
    let last = traj.last();
    let summary = SimulationSummary {
        final_t_s: last.t_s,
        final_x_m: last.x_m,
        final_z_m: last.z_m,
        rise_m: traj.rise(),
        surfaced: traj.surfaced,
    };
    writeln!(out, "{}", serde_json::to_string_pretty(&summary)?)?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub rpm: f64,
    pub speed_mm_s: f64,
    pub lambda: f64,
    /// Reduction of the front auger in its advancing sense.
    pub eta: f64,
    /// Static drag at the burial depth times `eta`.
    pub q_rot_n: f64,
    pub thrust_n: f64,
    pub net_force_n: f64,
}

pub const SWEEP_HEADER: [&str; 7] = ["rpm", "speed_mm_s", "lambda", "eta", "q_rot_n", "thrust_n", "net_force_n"];

fn sweep_cell(robot: &DualAugerRobot, rpm: f64, speed: f64) -> Result<SweepRow> {
    let lambda = slip_velocity(robot.front.outer_diameter_mm, rpm, speed)?;
    let eta = robot.curves.eta(&robot.front, robot.front.handedness.advancing_rotation(), lambda)?;
    let q_static = robot.static_drag.resistance(robot.burial_depth_m)?;
    let kin = robot.burrowing_kinematics(rpm, speed)?;
    Ok(SweepRow {
        rpm,
        speed_mm_s: speed,
        lambda,
        eta,
        q_rot_n: q_static * eta,
        thrust_n: total_thrust(robot, rpm)?,
        net_force_n: net_axial_force(robot, &kin, robot.burial_depth_m)?,
    })
}

/// Evaluates the grid rpm-major, in input order. Cells run in parallel on
/// `threads` workers (0 for the default pool); the output order is fixed.
pub fn sweep(robot: &DualAugerRobot, rpms: &[f64], speeds: &[f64], threads: usize) -> Result<Vec<SweepRow>> {
    if rpms.is_empty() || speeds.is_empty() {
        return Err(Error::Argument("--rpm-list and --speed-list must be nonempty".into()));
    }
    let cells: Vec<(f64, f64)> = rpms.iter().flat_map(|&r| speeds.iter().map(move |&s| (r, s))).collect();
    let eval = || cells.par_iter().map(|&(r, s)| sweep_cell(robot, r, s)).collect::<Result<Vec<_>>>();
    if threads == 0 {
        eval()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::Argument(format!("thread pool: {e}")))?
            .install(eval)
    }
}

pub(super) fn sweep_cmd<W: Write>(
    config: &Path,
    rpms: &[f64],
    speeds: &[f64],
    out_path: &Path,
    threads: usize,
    out: &mut W,
) -> Result<()> {
    if rpms.is_empty() || speeds.is_empty() {
        return Err(Error::Argument("--rpm-list and --speed-list must be nonempty".into()));
    }
    let cfg = RunConfig::load(config)?;
    let robot = cfg.robot()?;
    let rows = sweep(&robot, rpms, speeds, threads)?;
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(create(out_path)?);
    w.write_record(SWEEP_HEADER)?;
    for r in &rows {
        w.write_record([r.rpm, r.speed_mm_s, r.lambda, r.eta, r.q_rot_n, r.thrust_n, r.net_force_n].map(csv_number))?;
    }
    w.flush()?;
    writeln!(out, "{} rows written to {}", rows.len(), out_path.display())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(format_significant(131.946, 4), "131.9");
        assert_eq!(format_significant(0.0, 4), "0.000");
        assert_eq!(format_significant(132.9956, 4), "133.0");
        assert_eq!(format_significant(9.99996, 4), "10.00");
        assert_eq!(format_significant(0.012345, 3), "0.0123");
        assert_eq!(format_significant(12345.6, 3), "12346");
    }
}
