//! Command-line front end.

mod commands;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use commands::{
    format_significant, predict, run_calibrate, simulate, sweep, Prediction, SimulationSummary, SweepRow, SWEEP_HEADER,
};

use crate::error::Result;

#[derive(Debug, Parser)]
#[command(name = "burrowsim", version, about = "Auger burrowing mechanics in granular media")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Relative slip velocity of an auger.
    Slip {
        /// Outer diameter, mm.
        #[arg(long)]
        diameter: f64,
        #[arg(long)]
        rpm: f64,
        /// Translation speed, mm/s.
        #[arg(long)]
        speed: f64,
    },
    /// Fit every "fit" entry of a configuration to a dataset.
    Calibrate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Go/no-go, thrust, drag floor and equilibrium speed at one rotation speed.
    Predict {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        rpm: f64,
    },
    /// Quasi-static trajectory at constant rotation speed.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        rpm: f64,
        /// Seconds; defaults to the configuration value.
        #[arg(long)]
        duration: Option<f64>,
        /// Seconds; defaults to the configuration value.
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Drag and force grid over rotation and translation speeds.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long = "rpm-list", value_delimiter = ',', num_args = 1..)]
        rpm_list: Vec<f64>,
        #[arg(long = "speed-list", value_delimiter = ',', num_args = 1..)]
        speed_list: Vec<f64>,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads; 0 uses the rayon default.
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
}

/// Runs one command, writing human-facing output to `stdout`.
pub fn run<W: Write>(command: Command, stdout: &mut W) -> Result<()> {
    match command {
        Command::Slip { diameter, rpm, speed } => commands::slip(diameter, rpm, speed, stdout),
        Command::Calibrate { config, data, out } => commands::calibrate_cmd(&config, &data, &out, stdout),
        Command::Predict { config, rpm } => commands::predict_cmd(&config, rpm, stdout),
        Command::Simulate { config, rpm, duration, dt, out } => {
            commands::simulate_cmd(&config, rpm, duration, dt, &out, stdout)
        }
        Command::Sweep { config, rpm_list, speed_list, out, threads } => {
            commands::sweep_cmd(&config, &rpm_list, &speed_list, &out, threads, stdout)
        }
    }
}
