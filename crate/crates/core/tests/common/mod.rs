#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::OnceLock;

use burrowsim::calibration::read_dataset;
use burrowsim::cli::run_calibrate;
use burrowsim::config::RunConfig;
use burrowsim::granular::{ReductionCurve, StaticDragModel, ThrustCurve};
use burrowsim::robot::{ComponentShares, CurvePair, DualAugerRobot};

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

pub fn default_config() -> RunConfig {
    RunConfig::load(&data_dir().join("default.json")).expect("default config")
}

/// `data/default.json` calibrated against `data/lab-dataset.csv`, computed once.
pub fn calibrated() -> &'static RunConfig {
    static CELL: OnceLock<RunConfig> = OnceLock::new();
    CELL.get_or_init(|| {
        let file = std::fs::File::open(data_dir().join("lab-dataset.csv")).unwrap();
        let data = read_dataset(file).unwrap();
        run_calibrate(&default_config(), &data).expect("calibration")
    })
}

pub fn calibrated_robot() -> DualAugerRobot {
    calibrated().robot().unwrap()
}

/// A hand-set robot for tests that should not depend on calibration.
pub fn fixed_robot() -> DualAugerRobot {
    DualAugerRobot::with_model(
        ComponentShares::new(0.0, 20.0, 6.0).unwrap(),
        CurvePair {
            cw: ReductionCurve::new(0.04, 12.0, 0.5).unwrap(),
            ccw: ReductionCurve::new(0.9, 12.0, 0.5).unwrap(),
        },
        ThrustCurve::measured(),
        StaticDragModel::new(26.0, 1.0, 0.1).unwrap(),
    )
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}
