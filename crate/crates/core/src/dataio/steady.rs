use serde::{Deserialize, Serialize};

use super::{Channel, ForceTrace};
use crate::error::{Error, Result};

/// Coefficient of variation above which the auto window keeps shrinking.
pub const AUTO_CV_THRESHOLD: f64 = 0.05;
/// Fewest samples the auto window may shrink to.
pub const AUTO_MIN_SAMPLES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum SteadyWindow {
    /// Samples with `t_start ≤ t ≤ t_end`.
    Explicit { t_start: f64, t_end: f64 },
    /// Trailing half of the trace, trimmed from the front until it is quiet.
    Auto,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteadyValue {
    pub value: f64,
    pub window_start_s: f64,
    pub window_end_s: f64,
    pub samples: usize,
    /// Set when the auto rule fell back to its minimum window.
    pub flag: Option<String>,
}

/// Mean of `channel` over a steady window.
///
/// The auto rule starts from the trailing half of the record and moves the
/// window start forward one sample at a time while the in-window standard
/// deviation exceeds 5 % of the in-window mean magnitude, stopping at 10
/// samples. If even that floor is noisy the floor is used and flagged.
pub fn steady_state_mean(trace: &ForceTrace, channel: Channel, window: SteadyWindow) -> Result<SteadyValue> {
    trace.validate()?;
    let t = &trace.t;
    let x = trace.channel(channel);
    let n = t.len();

    let (start, end, flag) = match window {
        SteadyWindow::Explicit { t_start, t_end } => {
            if !(t_end > t_start) {
                return Err(Error::Window(format!("window end {t_end} is not after start {t_start}")));
            }
            if t_end < t[0] || t_start > t[n - 1] {
                return Err(Error::Window(format!(
                    "window [{t_start}, {t_end}] does not overlap the trace [{}, {}]",
                    t[0],
                    t[n - 1]
                )));
            }
            let start = t.partition_point(|&ti| ti < t_start);
            let end = t.partition_point(|&ti| ti <= t_end);
            if end - start < 2 {
                return Err(Error::Window(format!(
                    "window [{t_start}, {t_end}] holds {} sample(s), need >= 2",
                    end - start
                )));
            }
            (start, end, None)
        }
        SteadyWindow::Auto => {
            let t_mid = t[0] + 0.5 * (t[n - 1] - t[0]);
            let first = t.partition_point(|&ti| ti < t_mid);
            if n - first < 2 {
                return Err(Error::Window("trailing half holds fewer than 2 samples".into()));
            }
            let floor = AUTO_MIN_SAMPLES.min(n - first);
            let last_start = n - floor;
            let quiet = suffix_quiet(x, first);
            match (first..=last_start).find(|&i| quiet[i - first]) {
                Some(i) => (i, n, None),
                None => (
                    last_start,
                    n,
                    Some(format!(
                        "no window met the {}% variation threshold; used the trailing {floor} samples",
                        AUTO_CV_THRESHOLD * 100.0
                    )),
                ),
            }
        }
    };

    let slice = &x[start..end];
    let value = slice.iter().sum::<f64>() / slice.len() as f64;
    Ok(SteadyValue { value, window_start_s: t[start], window_end_s: t[end - 1], samples: slice.len(), flag })
}

/// For every start index `i ≥ first`, whether `x[i..]` meets the variation threshold.
fn suffix_quiet(x: &[f64], first: usize) -> Vec<bool> {
    let n = x.len();
    let mut quiet = vec![false; n - first];
    // Welford accumulation from the back
    let (mut count, mut mean, mut m2) = (0.0_f64, 0.0_f64, 0.0_f64);
    for i in (first..n).rev() {
        count += 1.0;
        let delta = x[i] - mean;
        mean += delta / count;
        m2 += delta * (x[i] - mean);
        let std = (m2 / count).max(0.0).sqrt();
        quiet[i - first] = std <= AUTO_CV_THRESHOLD * mean.abs();
    }
    quiet
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trace(t: Vec<f64>, fx: Vec<f64>) -> ForceTrace {
        let z = vec![0.0; t.len()];
        ForceTrace::new(t, [fx, z.clone(), z.clone(), z.clone(), z.clone(), z]).unwrap()
    }

    #[test]
    fn constant_channel() {
        let t: Vec<f64> = (0..50).map(|i| i as f64 * 0.1).collect();
        let tr = trace(t, vec![12.0; 50]);
        for w in [SteadyWindow::Auto, SteadyWindow::Explicit { t_start: 1.0, t_end: 2.0 }] {
            assert_eq!(steady_state_mean(&tr, Channel::Fx, w).unwrap().value, 12.0);
        }
    }

    #[test]
    fn window_errors() {
        let t: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let tr = trace(t, vec![1.0; 20]);
        let outside = SteadyWindow::Explicit { t_start: 50.0, t_end: 60.0 };
        assert!(matches!(steady_state_mean(&tr, Channel::Fx, outside), Err(Error::Window(_))));
        let one = SteadyWindow::Explicit { t_start: 3.5, t_end: 4.5 };
        assert!(matches!(steady_state_mean(&tr, Channel::Fx, one), Err(Error::Window(_))));
    }

    #[test]
    fn noisy_tail_falls_back_with_flag() {
        let t: Vec<f64> = (0..40).map(|i| i as f64).collect();
        let fx: Vec<f64> = (0..40).map(|i| if i % 2 == 0 { 10.0 } else { -10.0 }).collect();
        let v = steady_state_mean(&trace(t, fx), Channel::Fx, SteadyWindow::Auto).unwrap();
        assert_eq!(v.samples, 10);
        assert!(v.flag.is_some());
        assert_eq!(v.value, 0.0);
    }

    #[test]
    fn auto_trims_transient() {
        // trailing half starts in a decaying transient, then settles
        let t: Vec<f64> = (0..200).map(|i| i as f64).collect();
        let fx: Vec<f64> = (0..200).map(|i| if i < 130 { 50.0 } else { 20.0 }).collect();
        let v = steady_state_mean(&trace(t, fx), Channel::Fx, SteadyWindow::Auto).unwrap();
        assert_eq!(v.value, 20.0);
        assert_eq!(v.window_start_s, 130.0);
        assert!(v.flag.is_none());
    }
}
