//! Monte Carlo estimation of ergodic rate regions.

use std::fmt;

use crate::error::{Error, Result};
use crate::fading::{sample_state, sba_expand, ChannelState, FadingParams, SbaBlock};
use crate::rates::{rates_esa, rates_esa_cj, rates_gs_cj, rates_sba, PowerDecision, RateTriple};
use crate::sampling::{map_batches, Exec, Moments, SimRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Gaussian signalling with cooperative jamming.
    GsCj,
    /// Scaling-based alignment over odd/even slot pairs.
    Sba,
    /// Ergodic secret alignment.
    Esa,
    /// Ergodic secret alignment with cooperative jamming.
    EsaCj,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::GsCj, Scheme::Sba, Scheme::Esa, Scheme::EsaCj];

    pub fn name(&self) -> &'static str {
        match self {
            Scheme::GsCj => "gs-cj",
            Scheme::Sba => "sba",
            Scheme::Esa => "esa",
            Scheme::EsaCj => "esa-cj",
        }
    }

    pub fn allows_jamming(&self) -> bool {
        matches!(self, Scheme::GsCj | Scheme::EsaCj)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|x| x.name() == s.trim())
            .ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "unknown scheme '{s}' (expected gs-cj, sba, esa or esa-cj)"
                ))
            })
    }
}

/// What a policy gets to see: a single fading state, or both slots of an SBA
/// pair. SBA policies must only look at the odd slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Realization {
    Single(ChannelState),
    Block(SbaBlock),
}

impl Realization {
    /// The state the policy is allowed to act on (the odd slot for blocks).
    pub fn current(&self) -> &ChannelState {
        match self {
            Realization::Single(s) => s,
            Realization::Block(b) => &b.odd,
        }
    }
}

pub trait Policy: Sync {
    /// Powers for one realization. `rng` is the sample's own stream, for
    /// policies that need auxiliary randomness.
    fn decide(&self, realization: &Realization, rng: &mut SimRng) -> Result<PowerDecision>;
}

impl<F> Policy for F
where
    F: Fn(&Realization, &mut SimRng) -> Result<PowerDecision> + Sync,
{
    fn decide(&self, realization: &Realization, rng: &mut SimRng) -> Result<PowerDecision> {
        self(realization, rng)
    }
}

/// Draws one realization appropriate for `scheme`.
pub fn sample_realization(scheme: Scheme, params: &FadingParams, rng: &mut SimRng) -> Realization {
    match scheme {
        Scheme::Sba => {
            let odd = sample_state(params, rng);
            let even = sample_state(params, rng);
            Realization::Block(sba_expand(odd, even))
        }
        _ => Realization::Single(sample_state(params, rng)),
    }
}

/// Power each user actually spends on a realization. For SBA the symbols are
/// scaled by the other user's eavesdropper gain in both slots.
pub fn power_cost(realization: &Realization, d: &PowerDecision) -> [f64; 2] {
    match realization {
        Realization::Single(_) => d.user_power(),
        Realization::Block(b) => [
            (b.odd.g2.norm_sqr() + b.even.g2.norm_sqr()) * d.p1,
            (b.odd.g1.norm_sqr() + b.even.g1.norm_sqr()) * d.p2,
        ],
    }
}

/// Integrand of `scheme` at one realization.
pub fn instantaneous_rates(
    scheme: Scheme,
    realization: &Realization,
    d: &PowerDecision,
) -> Result<RateTriple> {
    d.validate()?;
    if !scheme.allows_jamming() && (d.q1 != 0.0 || d.q2 != 0.0) {
        return Err(Error::InvalidArgument(format!(
            "scheme {scheme} does not use jamming power, got {d:?}"
        )));
    }
    let rates = match (scheme, realization) {
        (Scheme::Sba, Realization::Block(b)) => rates_sba(b, d.p1, d.p2),
        (Scheme::GsCj, Realization::Single(s)) => rates_gs_cj(s, d),
        (Scheme::Esa, Realization::Single(s)) => rates_esa(s, d.p1, d.p2),
        (Scheme::EsaCj, Realization::Single(s)) => rates_esa_cj(s, d),
        _ => {
            return Err(Error::InvalidArgument(format!(
                "realization shape does not match scheme {scheme}"
            )));
        }
    };
    Ok(rates)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    /// Signed sample means of the integrands.
    pub mean: RateTriple,
    pub stderr: RateTriple,
    pub n: u64,
    /// Realized average power per user.
    pub power_mean: [f64; 2],
    pub power_stderr: [f64; 2],
}

impl MonteCarloEstimate {
    /// The achievable-region point: means clamped at zero.
    pub fn region(&self) -> RateTriple {
        self.mean.map(|x| x.max(0.0))
    }
}

#[derive(Clone, Copy, Default)]
struct Accumulator {
    rates: [Moments; 3],
    power: [Moments; 2],
}

impl Accumulator {
    fn merge(&mut self, other: &Accumulator) {
        for (a, b) in self.rates.iter_mut().zip(&other.rates) {
            a.merge(b);
        }
        for (a, b) in self.power.iter_mut().zip(&other.power) {
            a.merge(b);
        }
    }

    fn finish(&self) -> MonteCarloEstimate {
        let [r1, r2, rs] = &self.rates;
        MonteCarloEstimate {
            mean: RateTriple::new(r1.mean, r2.mean, rs.mean),
            stderr: RateTriple::new(r1.stderr(), r2.stderr(), rs.stderr()),
            n: r1.n,
            power_mean: [self.power[0].mean, self.power[1].mean],
            power_stderr: [self.power[0].stderr(), self.power[1].stderr()],
        }
    }
}

/// Ergodic rates of `scheme` under `policy` over `n` fresh realizations.
///
/// Sample `i` is drawn from the batch stream that contains it, so the result
/// depends on `(seed, n)` only, never on the thread count.
pub fn ergodic_region<P: Policy + ?Sized>(
    scheme: Scheme,
    policy: &P,
    params: &FadingParams,
    n: usize,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    ergodic_region_with(scheme, policy, params, n, seed, Exec::default())
}

pub fn ergodic_region_with<P: Policy + ?Sized>(
    scheme: Scheme,
    policy: &P,
    params: &FadingParams,
    n: usize,
    seed: u64,
    exec: Exec,
) -> Result<MonteCarloEstimate> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 samples, got {n}"
        )));
    }
    let parts = map_batches(n, seed, exec, |range, rng| -> Result<Accumulator> {
        let mut acc = Accumulator::default();
        for _ in range {
            let realization = sample_realization(scheme, params, rng);
            let d = policy.decide(&realization, rng)?;
            let r = instantaneous_rates(scheme, &realization, &d)?;
            acc.rates[0].push(r.r1);
            acc.rates[1].push(r.r2);
            acc.rates[2].push(r.rsum);
            let cost = power_cost(&realization, &d);
            acc.power[0].push(cost[0]);
            acc.power[1].push(cost[1]);
        }
        Ok(acc)
    });
    let mut total = Accumulator::default();
    for part in parts {
        total.merge(&part?);
    }
    Ok(total.finish())
}
