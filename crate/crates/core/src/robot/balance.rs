use serde::{Deserialize, Serialize};

/// Forces read at one slow towing speed: rotating robot on its rod, the bare
/// rod, and the stationary thrust at the same rpm.
///
/// Whether the towed reading already nets out the auger thrust is not
/// settled by the measurement itself, so both readings are offered.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForceBalanceReading {
    pub rotational_drag_n: f64,
    pub rod_drag_n: f64,
    pub thrust_n: f64,
}

impl ForceBalanceReading {
    /// Towed force with the rod subtracted, taken at face value.
    pub fn raw_net(&self) -> f64 {
        self.rotational_drag_n - self.rod_drag_n
    }

    /// Robot drag if the towed force is drag minus thrust: `raw_net + thrust`.
    pub fn thrust_inclusive_drag(&self) -> f64 {
        self.raw_net() + self.thrust_n
    }

    /// Whole-robot reduction factor implied by [`thrust_inclusive_drag`](Self::thrust_inclusive_drag)
    /// against a static drag baseline.
    pub fn implied_eta(&self, static_drag_n: f64) -> f64 {
        self.thrust_inclusive_drag() / static_drag_n
    }
}
