//! Fixed and on/off power policies.

use crate::error::Result;
use crate::fading::{sample_state, sba_expand, ChannelState, FadingParams};
use crate::montecarlo::{Policy, Realization};
use crate::rates::{rates_esa, rates_sba, PowerBudget, PowerDecision};
use crate::sampling::SimRng;

/// The same decision in every state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantPolicy(pub PowerDecision);

impl Policy for ConstantPolicy {
    fn decide(&self, _: &Realization, _: &mut SimRng) -> Result<PowerDecision> {
        Ok(self.0)
    }
}

/// Full budget when the ESA sum-rate integrand at full power is nonnegative,
/// silence otherwise.
pub fn rudimentary_policy_esa(state: &ChannelState, budget: &PowerBudget) -> PowerDecision {
    let (p1, p2) = (budget.pbar1(), budget.pbar2());
    if rates_esa(state, p1, p2).rsum >= 0.0 {
        PowerDecision::transmit(p1, p2)
    } else {
        PowerDecision::ZERO
    }
}

/// SBA powers that meet the budget on average when always on:
/// `P1 = P̄1 / (2 var_g2)`, `P2 = P̄2 / (2 var_g1)`.
pub fn sba_candidate_powers(budget: &PowerBudget, params: &FadingParams) -> (f64, f64) {
    (
        budget.pbar1() / (2.0 * params.var_g2()),
        budget.pbar2() / (2.0 * params.var_g1()),
    )
}

/// On/off SBA decision from the odd slot alone.
///
/// The even slot is unknown when the powers are chosen, so the sum-rate
/// integrand is averaged over `m_inner` fresh even-slot states; transmission
/// happens when that inner mean is nonnegative.
pub fn rudimentary_policy_sba(
    odd: &ChannelState,
    budget: &PowerBudget,
    params: &FadingParams,
    m_inner: usize,
    rng: &mut SimRng,
) -> PowerDecision {
    let (p1, p2) = sba_candidate_powers(budget, params);
    let m = m_inner.max(1);
    let mut sum = 0.0;
    for _ in 0..m {
        let even = sample_state(params, rng);
        sum += rates_sba(&sba_expand(*odd, even), p1, p2).rsum;
    }
    if sum / m as f64 >= 0.0 {
        PowerDecision::transmit(p1, p2)
    } else {
        PowerDecision::ZERO
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RudimentaryEsa {
    pub budget: PowerBudget,
}

impl Policy for RudimentaryEsa {
    fn decide(&self, realization: &Realization, _: &mut SimRng) -> Result<PowerDecision> {
        Ok(rudimentary_policy_esa(realization.current(), &self.budget))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RudimentarySba {
    pub budget: PowerBudget,
    pub params: FadingParams,
    pub m_inner: usize,
}

impl Policy for RudimentarySba {
    fn decide(&self, realization: &Realization, rng: &mut SimRng) -> Result<PowerDecision> {
        Ok(rudimentary_policy_sba(
            realization.current(),
            &self.budget,
            &self.params,
            self.m_inner,
            rng,
        ))
    }
}
