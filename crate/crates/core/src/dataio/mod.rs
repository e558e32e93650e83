//! Ingestion of recorded traces and their reduction to calibration points.

mod bundle;
mod steady;
mod table;
mod trace;

pub use bundle::{
    bundle_dataset, read_steady_summary, write_steady_summary, EntryKind, SteadyEntry, STEADY_SUMMARY_HEADER,
};
pub use steady::{steady_state_mean, SteadyValue, SteadyWindow, AUTO_CV_THRESHOLD, AUTO_MIN_SAMPLES};
pub use trace::{
    load_force_trace, load_marker_track, write_force_trace, write_marker_track, Channel, ForceTrace, MarkerTrack,
    FORCE_TRACE_HEADER, MARKER_TRACK_HEADER,
};
