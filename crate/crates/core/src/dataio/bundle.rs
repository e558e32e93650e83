use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::steady::SteadyValue;
use crate::calibration::{CalibrationPoint, CurveId, Observation};
use crate::error::{Error, Result};
use crate::granular::{slip_velocity, Rotation};

pub const STEADY_SUMMARY_HEADER: [&str; 10] =
    ["label", "kind", "rpm", "speed_mm_s", "direction", "depth_m", "value", "window_start_s", "window_end_s", "flag"];

/// What a steady reading measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EntryKind {
    /// Drag without rotation; becomes the normalization baseline.
    Static,
    /// Drag with rotation, normalized into a point on `curve`.
    Rotational { curve: CurveId },
    /// Thrust of a stationary auger.
    Thrust,
}

impl EntryKind {
    fn label(&self) -> &'static str {
        match self {
            EntryKind::Static => "static",
            EntryKind::Thrust => "thrust",
            EntryKind::Rotational { curve } => curve.as_str(),
        }
    }

    fn parse(s: &str) -> Result<Self> {
        match s {
            "static" => Ok(EntryKind::Static),
            "thrust" => Ok(EntryKind::Thrust),
            other => Ok(EntryKind::Rotational { curve: other.parse()? }),
        }
    }
}

/// One steady reading with the test conditions it was taken under.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteadyEntry {
    pub label: String,
    pub kind: EntryKind,
    pub rpm: f64,
    pub speed_mm_s: f64,
    pub direction: Rotation,
    pub depth_m: f64,
    pub steady: SteadyValue,
}

/// Turns steady readings into calibration points.
///
/// Rotational readings are divided by the mean static reading and placed at
/// the slip velocity of an auger of `diameter_mm`. Each point's provenance is
/// its entry label.
pub fn bundle_dataset(entries: &[SteadyEntry], diameter_mm: f64) -> Result<Vec<CalibrationPoint>> {
    let statics: Vec<f64> = entries.iter().filter(|e| e.kind == EntryKind::Static).map(|e| e.steady.value).collect();
    let baseline = (!statics.is_empty()).then(|| statics.iter().sum::<f64>() / statics.len() as f64);

    let mut out = Vec::with_capacity(entries.len());
    for e in entries {
        let observation = match e.kind {
            EntryKind::Static => {
                Observation::Static { depth_m: e.depth_m, v_mm_s: e.speed_mm_s, force_n: e.steady.value }
            }
            EntryKind::Thrust => Observation::Thrust { rpm: e.rpm, thrust_n: e.steady.value },
            EntryKind::Rotational { curve } => {
                let baseline = baseline.ok_or_else(|| {
                    Error::Data(format!("{}: normalized drag needs a static baseline entry", e.label))
                })?;
                if !(baseline > 0.0) {
                    return Err(Error::Data(format!("static baseline must be > 0, got {baseline}")));
                }
                let rpm = if e.direction == Rotation::Stopped { 0.0 } else { e.rpm };
                Observation::Reduction {
                    lambda: slip_velocity(diameter_mm, rpm, e.speed_mm_s)?,
                    eta: e.steady.value / baseline,
                    curve,
                    opt_in: false,
                }
            }
        };
        let mut point = CalibrationPoint::new(observation);
        point.provenance = Some(e.label.clone());
        point.validate()?;
        out.push(point);
    }
    Ok(out)
}

/// Writes `label,kind,rpm,speed_mm_s,direction,depth_m,value,window_start_s,window_end_s,flag`.
pub fn write_steady_summary<W: Write>(entries: &[SteadyEntry], sink: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(sink);
    w.write_record(STEADY_SUMMARY_HEADER)?;
    for e in entries {
        w.write_record([
            e.label.as_str(),
            e.kind.label(),
            &e.rpm.to_string(),
            &e.speed_mm_s.to_string(),
            e.direction.as_str(),
            &e.depth_m.to_string(),
            &e.steady.value.to_string(),
            &e.steady.window_start_s.to_string(),
            &e.steady.window_end_s.to_string(),
            e.steady.flag.as_deref().unwrap_or(""),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a summary written by [`write_steady_summary`]. Sample counts are not
/// stored and come back as 0.
pub fn read_steady_summary<R: Read>(source: R) -> Result<Vec<SteadyEntry>> {
    let mut reader = csv::ReaderBuilder::new().from_reader(source);
    let headers = reader.headers()?.clone();
    let idx: Vec<usize> = STEADY_SUMMARY_HEADER
        .iter()
        .map(|name| headers.iter().position(|h| h == *name).ok_or_else(|| Error::Schema { column: (*name).into() }))
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record?;
        let cell = |c: usize| record.get(idx[c]).unwrap_or("");
        let num = |c: usize| -> Result<f64> {
            cell(c).trim().parse::<f64>().map_err(|_| Error::Parse {
                row,
                column: STEADY_SUMMARY_HEADER[c].into(),
                value: cell(c).into(),
            })
        };
        let flag = cell(9);
        out.push(SteadyEntry {
            label: cell(0).to_string(),
            kind: EntryKind::parse(cell(1)).map_err(|e| Error::Data(format!("row {row}: {e}")))?,
            rpm: num(2)?,
            speed_mm_s: num(3)?,
            direction: cell(4).parse().map_err(|e| Error::Data(format!("row {row}: {e}")))?,
            depth_m: num(5)?,
            steady: SteadyValue {
                value: num(6)?,
                window_start_s: num(7)?,
                window_end_s: num(8)?,
                samples: 0,
                flag: (!flag.is_empty()).then(|| flag.to_string()),
            },
        });
    }
    Ok(out)
}
