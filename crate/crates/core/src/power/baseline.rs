//! Approximate power control for Gaussian signalling with cooperative jamming.
//!
//! This is a reference curve, not an optimal policy. It only enforces the
//! known structure of the optimum: nobody transmits when both users are
//! weaker at the main receiver, no user both transmits and jams, and only a
//! user that is weaker at the main receiver jams. Within that structure each
//! active user gets a single-user water-filling power on the raw gains.

use crate::error::Result;
use crate::fading::ChannelState;
use crate::montecarlo::{Policy, Realization};
use crate::power::esa::single_user_power;
use crate::power::DualVars;
use crate::rates::PowerDecision;
use crate::sampling::SimRng;

/// Which structural region a state falls into.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineRegion {
    /// `|h1| ≤ |g1|` and `|h2| ≤ |g2|`.
    Off,
    /// Both users stronger at the main receiver.
    BothTransmit,
    /// User 1 transmits, user 2 jams.
    FirstTransmits,
    /// User 2 transmits, user 1 jams.
    SecondTransmits,
}

pub fn baseline_region(state: &ChannelState) -> BaselineRegion {
    let g = state.power_gains();
    match (g.h1 > g.g1, g.h2 > g.g2) {
        (false, false) => BaselineRegion::Off,
        (true, true) => BaselineRegion::BothTransmit,
        (true, false) if g.h2 == g.g2 => BaselineRegion::BothTransmit,
        (false, true) if g.h1 == g.g1 => BaselineRegion::BothTransmit,
        (true, false) => BaselineRegion::FirstTransmits,
        (false, true) => BaselineRegion::SecondTransmits,
    }
}

/// Transmit power `root(|h|², |g|², λ)`; a jammer uses the same root with
/// the roles of its two gains exchanged.
pub fn gs_cj_baseline_policy(state: &ChannelState, duals: &DualVars) -> PowerDecision {
    let g = state.power_gains();
    let (l1, l2) = (duals.lambda1, duals.lambda2);
    match baseline_region(state) {
        BaselineRegion::Off => PowerDecision::ZERO,
        BaselineRegion::BothTransmit => PowerDecision::transmit(
            single_user_power(g.h1, g.g1, l1),
            single_user_power(g.h2, g.g2, l2),
        ),
        BaselineRegion::FirstTransmits => PowerDecision::new(
            single_user_power(g.h1, g.g1, l1),
            0.0,
            0.0,
            single_user_power(g.g2, g.h2, l2),
        ),
        BaselineRegion::SecondTransmits => PowerDecision::new(
            0.0,
            single_user_power(g.h2, g.g2, l2),
            single_user_power(g.g1, g.h1, l1),
            0.0,
        ),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GsCjBaselinePolicy {
    pub duals: DualVars,
}

impl Policy for GsCjBaselinePolicy {
    fn decide(&self, realization: &Realization, _: &mut SimRng) -> Result<PowerDecision> {
        Ok(gs_cj_baseline_policy(realization.current(), &self.duals))
    }
}
