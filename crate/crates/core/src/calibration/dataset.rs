use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::granular::{Rotation, RotationState};

pub const DATASET_HEADER: [&str; 7] = ["kind", "arg1", "arg2", "arg3", "arg4", "value", "weight"];
pub const PROVENANCE_COLUMN: &str = "provenance";
/// Marker in `arg4` of a reduction row that keeps it out of fits unless requested.
pub const OPT_IN_MARKER: &str = "opt_in";

/// Which reduction curve a normalized drag reading belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveId {
    HorizontalCw,
    HorizontalCcw,
    VerticalCw,
    VerticalCcw,
}

impl CurveId {
    pub const ALL: [CurveId; 4] =
        [CurveId::HorizontalCw, CurveId::HorizontalCcw, CurveId::VerticalCw, CurveId::VerticalCcw];

    pub fn as_str(self) -> &'static str {
        match self {
            CurveId::HorizontalCw => "horizontal_cw",
            CurveId::HorizontalCcw => "horizontal_ccw",
            CurveId::VerticalCw => "vertical_cw",
            CurveId::VerticalCcw => "vertical_ccw",
        }
    }
}

impl fmt::Display for CurveId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CurveId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CurveId::ALL
            .into_iter()
            .find(|c| c.as_str() == s.trim())
            .ok_or_else(|| Error::Data(format!("unknown curve {s:?}")))
    }
}

/// One observation that a fit can consume.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Observation {
    /// Normalized drag `η` observed at slip velocity `lambda`.
    Reduction { lambda: f64, eta: f64, curve: CurveId, opt_in: bool },
    /// Stationary thrust at `rpm`.
    Thrust { rpm: f64, thrust_n: f64 },
    /// Whole-robot drag under a given auger command.
    KinematicCase { front: RotationState, back: RotationState, v_mm_s: f64, force_n: f64 },
    /// Drag without rotation.
    Static { depth_m: f64, v_mm_s: f64, force_n: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationPoint {
    pub observation: Observation,
    pub weight: f64,
    pub provenance: Option<String>,
}

impl CalibrationPoint {
    pub fn new(observation: Observation) -> Self {
        CalibrationPoint { observation, weight: 1.0, provenance: None }
    }

    pub fn with_weight(mut self, weight: f64) -> Self {
        self.weight = weight;
        self
    }

    pub fn reduction(lambda: f64, eta: f64, curve: CurveId) -> Self {
        Self::new(Observation::Reduction { lambda, eta, curve, opt_in: false })
    }

    pub fn thrust(rpm: f64, thrust_n: f64) -> Self {
        Self::new(Observation::Thrust { rpm, thrust_n })
    }

    pub fn kinematic_case(front: RotationState, back: RotationState, v_mm_s: f64, force_n: f64) -> Self {
        Self::new(Observation::KinematicCase { front, back, v_mm_s, force_n })
    }

    pub fn static_drag(depth_m: f64, v_mm_s: f64, force_n: f64) -> Self {
        Self::new(Observation::Static { depth_m, v_mm_s, force_n })
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.weight >= 0.0) || !self.weight.is_finite() {
            return Err(Error::Data(format!("weight must be finite and >= 0, got {}", self.weight)));
        }
        let finite = |vals: &[f64]| vals.iter().all(|v| v.is_finite());
        let ok = match &self.observation {
            Observation::Reduction { lambda, eta, .. } => finite(&[*lambda, *eta]) && *lambda >= 0.0,
            Observation::Thrust { rpm, thrust_n } => finite(&[*rpm, *thrust_n]),
            Observation::KinematicCase { v_mm_s, force_n, front, back } => {
                finite(&[*v_mm_s, *force_n, front.rpm, back.rpm])
            }
            Observation::Static { depth_m, v_mm_s, force_n } => finite(&[*depth_m, *v_mm_s, *force_n]),
        };
        if !ok {
            return Err(Error::Data(format!("invalid observation {:?}", self.observation)));
        }
        Ok(())
    }
}

/// An ordered list of calibration points.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub points: Vec<CalibrationPoint>,
}

impl Dataset {
    pub fn new(points: Vec<CalibrationPoint>) -> Self {
        Dataset { points }
    }

    /// Reduction points for one curve; opt-in rows only when `include_opt_in`.
    pub fn reduction_points(&self, curve: CurveId, include_opt_in: bool) -> Vec<CalibrationPoint> {
        self.points
            .iter()
            .filter(|p| match p.observation {
                Observation::Reduction { curve: c, opt_in, .. } => c == curve && (include_opt_in || !opt_in),
                _ => false,
            })
            .cloned()
            .collect()
    }

    pub fn of_kind(&self, pred: impl Fn(&Observation) -> bool) -> Vec<CalibrationPoint> {
        self.points.iter().filter(|p| pred(&p.observation)).cloned().collect()
    }
}

fn format_rotation(r: &RotationState) -> String {
    match r.effective_direction() {
        Rotation::Stopped => "stopped".into(),
        d => format!("{}:{}", d.as_str(), r.rpm),
    }
}

fn parse_rotation(cell: &str) -> Result<RotationState> {
    let cell = cell.trim();
    match cell.split_once(':') {
        None => match cell.parse::<Rotation>()? {
            Rotation::Stopped => Ok(RotationState::STOPPED),
            _ => Err(Error::Data(format!("rotation {cell:?} needs a speed, e.g. cw:210"))),
        },
        Some((dir, rpm)) => {
            let rpm: f64 = rpm.trim().parse().map_err(|_| Error::Data(format!("bad rotation speed in {cell:?}")))?;
            RotationState::new(dir.parse()?, rpm)
        }
    }
}

/// Parses `kind,arg1,arg2,arg3,arg4,value,weight` with an optional trailing
/// `provenance` column.
pub fn read_dataset<R: Read>(source: R) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(source);
    let headers = reader.headers()?.clone();
    let idx: Vec<usize> = DATASET_HEADER
        .iter()
        .map(|name| headers.iter().position(|h| h == *name).ok_or_else(|| Error::Schema { column: (*name).into() }))
        .collect::<Result<_>>()?;
    let prov = headers.iter().position(|h| h == PROVENANCE_COLUMN);

    let mut points = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record?;
        let cell = |c: usize| record.get(idx[c]).unwrap_or("");
        let num = |c: usize| -> Result<f64> {
            cell(c).parse::<f64>().map_err(|_| Error::Parse {
                row,
                column: DATASET_HEADER[c].into(),
                value: cell(c).into(),
            })
        };
        let at_row = |e: Error| Error::Data(format!("row {row}: {e}"));

        let observation = match cell(0) {
            "reduction" => Observation::Reduction {
                lambda: num(1)?,
                eta: num(5)?,
                curve: cell(2).parse().map_err(at_row)?,
                opt_in: match cell(4) {
                    "" => false,
                    OPT_IN_MARKER => true,
                    other => return Err(at_row(Error::Data(format!("unknown flag {other:?}")))),
                },
            },
            "thrust" => Observation::Thrust { rpm: num(1)?, thrust_n: num(5)? },
            "kinematic_case" => Observation::KinematicCase {
                front: parse_rotation(cell(1)).map_err(at_row)?,
                back: parse_rotation(cell(2)).map_err(at_row)?,
                v_mm_s: num(3)?,
                force_n: num(5)?,
            },
            "static" => Observation::Static { depth_m: num(1)?, v_mm_s: num(2)?, force_n: num(5)? },
            other => {
                return Err(Error::Parse { row, column: "kind".into(), value: other.into() });
            }
        };
        let weight = if cell(6).is_empty() { 1.0 } else { num(6)? };
        let provenance = prov.and_then(|p| record.get(p)).filter(|s| !s.is_empty()).map(str::to_string);
        let point = CalibrationPoint { observation, weight, provenance };
        point.validate().map_err(at_row)?;
        points.push(point);
    }
    Ok(Dataset { points })
}

pub fn write_dataset<W: Write>(dataset: &Dataset, sink: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(sink);
    let mut header: Vec<&str> = DATASET_HEADER.to_vec();
    header.push(PROVENANCE_COLUMN);
    w.write_record(&header)?;
    for p in &dataset.points {
        let (kind, args, value): (&str, [String; 4], f64) = match &p.observation {
            Observation::Reduction { lambda, eta, curve, opt_in } => (
                "reduction",
                [
                    lambda.to_string(),
                    curve.to_string(),
                    String::new(),
                    if *opt_in { OPT_IN_MARKER.into() } else { String::new() },
                ],
                *eta,
            ),
            Observation::Thrust { rpm, thrust_n } => {
                ("thrust", [rpm.to_string(), String::new(), String::new(), String::new()], *thrust_n)
            }
            Observation::KinematicCase { front, back, v_mm_s, force_n } => (
                "kinematic_case",
                [format_rotation(front), format_rotation(back), v_mm_s.to_string(), String::new()],
                *force_n,
            ),
            Observation::Static { depth_m, v_mm_s, force_n } => {
                ("static", [depth_m.to_string(), v_mm_s.to_string(), String::new(), String::new()], *force_n)
            }
        };
        let [a1, a2, a3, a4] = args;
        w.write_record([
            kind,
            &a1,
            &a2,
            &a3,
            &a4,
            &value.to_string(),
            &p.weight.to_string(),
            p.provenance.as_deref().unwrap_or(""),
        ])?;
    }
    w.flush()?;
    Ok(())
}
