use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::table::{check_increasing, read_numeric_columns, write_numeric_columns};
use crate::error::{Error, Result};

pub const FORCE_TRACE_HEADER: [&str; 7] = ["t_s", "fx_n", "fy_n", "fz_n", "tx_nm", "ty_nm", "tz_nm"];
pub const MARKER_TRACK_HEADER: [&str; 3] = ["t_s", "u", "v"];

/// Six-axis force/torque recording.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForceTrace {
    pub t: Vec<f64>,
    pub fx: Vec<f64>,
    pub fy: Vec<f64>,
    pub fz: Vec<f64>,
    pub tx: Vec<f64>,
    pub ty: Vec<f64>,
    pub tz: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    Fx,
    Fy,
    Fz,
    Tx,
    Ty,
    Tz,
}

impl FromStr for Channel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "fx" | "fx_n" => Channel::Fx,
            "fy" | "fy_n" => Channel::Fy,
            "fz" | "fz_n" => Channel::Fz,
            "tx" | "tx_nm" => Channel::Tx,
            "ty" | "ty_nm" => Channel::Ty,
            "tz" | "tz_nm" => Channel::Tz,
            other => return Err(Error::Argument(format!("unknown channel {other:?}"))),
        })
    }
}

impl ForceTrace {
    pub fn new(t: Vec<f64>, channels: [Vec<f64>; 6]) -> Result<Self> {
        let [fx, fy, fz, tx, ty, tz] = channels;
        let trace = ForceTrace { t, fx, fy, fz, tx, ty, tz };
        trace.validate()?;
        Ok(trace)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.t.len();
        if n < 2 {
            return Err(Error::Data(format!("force trace needs >= 2 samples, got {n}")));
        }
        let lens = [&self.fx, &self.fy, &self.fz, &self.tx, &self.ty, &self.tz].map(|c| c.len());
        if lens.iter().any(|&l| l != n) {
            return Err(Error::Data("force trace channels differ in length".into()));
        }
        check_increasing(&self.t)
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn channel(&self, channel: Channel) -> &[f64] {
        match channel {
            Channel::Fx => &self.fx,
            Channel::Fy => &self.fy,
            Channel::Fz => &self.fz,
            Channel::Tx => &self.tx,
            Channel::Ty => &self.ty,
            Channel::Tz => &self.tz,
        }
    }
}

/// Parses `t_s,fx_n,fy_n,fz_n,tx_nm,ty_nm,tz_nm`.
pub fn load_force_trace<R: Read>(source: R) -> Result<ForceTrace> {
    let mut cols = read_numeric_columns(source, &FORCE_TRACE_HEADER)?.into_iter();
    let mut next = || cols.next().unwrap();
    let t = next();
    ForceTrace::new(t, [next(), next(), next(), next(), next(), next()])
}

pub fn write_force_trace<W: Write>(trace: &ForceTrace, sink: W) -> Result<()> {
    write_numeric_columns(
        sink,
        &FORCE_TRACE_HEADER,
        &[&trace.t, &trace.fx, &trace.fy, &trace.fz, &trace.tx, &trace.ty, &trace.tz],
    )
}

/// Positions of one tracked marker, in metres, `v` pointing up.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkerTrack {
    pub t: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl MarkerTrack {
    pub fn new(t: Vec<f64>, u: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if t.len() != u.len() || t.len() != v.len() {
            return Err(Error::Data("marker track columns differ in length".into()));
        }
        check_increasing(&t)?;
        Ok(MarkerTrack { t, u, v })
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }
}

/// Parses `t_s,u,v` and converts positions to metres with `scale` (m per unit).
pub fn load_marker_track<R: Read>(source: R, scale: f64) -> Result<MarkerTrack> {
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::Argument(format!("scale must be > 0, got {scale}")));
    }
    let mut cols = read_numeric_columns(source, &MARKER_TRACK_HEADER)?.into_iter();
    let t = cols.next().unwrap();
    let mut u = cols.next().unwrap();
    let mut v = cols.next().unwrap();
    if scale != 1.0 {
        u.iter_mut().chain(v.iter_mut()).for_each(|x| *x *= scale);
    }
    MarkerTrack::new(t, u, v)
}

pub fn write_marker_track<W: Write>(track: &MarkerTrack, sink: W) -> Result<()> {
    write_numeric_columns(sink, &MARKER_TRACK_HEADER, &[&track.t, &track.u, &track.v])
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_ROWS: &str = "t_s,fx_n,fy_n,fz_n,tx_nm,ty_nm,tz_nm\n0,1,2,3,0.1,0.2,0.3\n0.01,1.5,2,3,0.1,0.2,0.3\n";

    #[test]
    fn minimal_trace() {
        let trace = load_force_trace(TWO_ROWS.as_bytes()).unwrap();
        assert_eq!(trace.len(), 2);
        assert_eq!(trace.channel(Channel::Fx), &[1.0, 1.5]);
    }

    #[test]
    fn decreasing_time_cites_row() {
        let mut csv = String::from("t_s,fx_n,fy_n,fz_n,tx_nm,ty_nm,tz_nm\n");
        for (i, t) in [0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 4.5, 6.0].iter().enumerate() {
            csv.push_str(&format!("{t},{i},0,0,0,0,0\n"));
        }
        let err = load_force_trace(csv.as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Data(_)));
        assert!(err.to_string().contains("row 7"), "{err}");
    }

    #[test]
    fn single_row_rejected() {
        let csv = "t_s,fx_n,fy_n,fz_n,tx_nm,ty_nm,tz_nm\n0,1,2,3,0.1,0.2,0.3\n";
        assert!(load_force_trace(csv.as_bytes()).is_err());
    }

    #[test]
    fn marker_scaling() {
        let csv = "t_s,u,v\n0,100,200\n1,110,200\n2,120,190\n";
        let unit = load_marker_track(csv.as_bytes(), 1.0).unwrap();
        assert_eq!(unit.u, vec![100.0, 110.0, 120.0]);
        let mm = load_marker_track(csv.as_bytes(), 0.001).unwrap();
        assert!((mm.u[2] - 0.12).abs() < 1e-15 && (mm.v[2] - 0.19).abs() < 1e-15);
        assert!(matches!(load_marker_track(csv.as_bytes(), 0.0), Err(Error::Argument(_))));
    }
}
