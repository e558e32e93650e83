//! Force laws for rotating helical augers in dry granular media, a model of a
//! dual-auger burrowing robot built on them, and the calibration and data
//! plumbing that ties the model to measurements.
//!
//! ```
//! use burrowsim::granular::{slip_velocity, ReductionCurve};
//!
//! let lambda = slip_velocity(24.0, 210.0, 26.0)?;
//! let curve = ReductionCurve::new(0.25, 9.0, 1.2)?;
//! assert!(curve.eval(lambda)? < 1.0);
//! # Ok::<(), burrowsim::Error>(())
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calibration;
pub mod cli;
pub mod config;
pub mod dataio;
pub mod error;
pub mod granular;
pub mod robot;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    struct Introduction;
    #[doc = include_str!("../../../book/src/force-laws.md")]
    struct ForceLaws;
    #[doc = include_str!("../../../book/src/robot-model.md")]
    struct RobotModel;
    #[doc = include_str!("../../../book/src/calibration.md")]
    struct Calibration;
    #[doc = include_str!("../../../book/src/data-pipeline.md")]
    struct DataPipeline;
    #[doc = include_str!("../../../book/src/command-line.md")]
    struct CommandLine;
}
