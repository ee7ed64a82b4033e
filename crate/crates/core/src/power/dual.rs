//! Multiplier search for the average-power constraints.
//!
//! A batch of states is drawn once and frozen. Each multiplier is then found
//! by a one-dimensional bracketed search (Illinois regula falsi in `ln λ`)
//! on the batch-average power of its user, holding the other multiplier
//! fixed, and the two searches alternate until both budgets are met.

use crate::error::{Error, Result};
use crate::fading::{sample_states, ChannelState, FadingParams};
use crate::power::baseline::gs_cj_baseline_policy;
use crate::power::cj::esa_cj_case_policy;
use crate::power::esa::esa_case_policy;
use crate::power::{DualVars, EffectiveState};
use crate::rates::{PowerBudget, PowerDecision};
use crate::sampling::{map_chunks, Exec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DualScheme {
    Esa,
    EsaCj,
    /// The approximate Gaussian-signalling baseline.
    GsCjBaseline,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualSearchConfig {
    /// Size of the frozen batch.
    pub n: usize,
    /// Relative tolerance on each realized average power.
    pub tol: f64,
    pub max_sweeps: usize,
    pub exec: Exec,
}

impl Default for DualSearchConfig {
    fn default() -> Self {
        Self {
            n: 20_000,
            tol: 1e-3,
            max_sweeps: 50,
            exec: Exec::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualSearchResult {
    pub duals: DualVars,
    /// Average power per user on the frozen batch.
    pub realized: [f64; 2],
    /// The budget cannot be used up even at a vanishing price.
    pub slack: [bool; 2],
    pub sweeps: usize,
}

/// Smallest multiplier tried before a constraint is declared slack.
const LAMBDA_FLOOR: f64 = 1e-30;

struct FrozenBatch {
    scheme: DualScheme,
    states: Vec<ChannelState>,
    effective: Vec<EffectiveState>,
    exec: Exec,
}

impl FrozenBatch {
    fn decide_one(&self, i: usize, duals: &DualVars) -> Result<PowerDecision> {
        match self.scheme {
            DualScheme::Esa => {
                let d = esa_case_policy(&self.effective[i], duals)?;
                Ok(PowerDecision::transmit(d.p1, d.p2))
            }
            DualScheme::EsaCj => Ok(esa_cj_case_policy(&self.effective[i], duals)?.decision),
            DualScheme::GsCjBaseline => Ok(gs_cj_baseline_policy(&self.states[i], duals)),
        }
    }

    fn average_power(&self, duals: &DualVars) -> Result<[f64; 2]> {
        let idx: Vec<usize> = (0..self.states.len()).collect();
        let parts = map_chunks(&idx, self.exec, |chunk| -> Result<[f64; 2]> {
            let mut sum = [0.0; 2];
            for &i in chunk {
                let u = self.decide_one(i, duals)?.user_power();
                sum[0] += u[0];
                sum[1] += u[1];
            }
            Ok(sum)
        });
        let mut total = [0.0; 2];
        for p in parts {
            let p = p?;
            total[0] += p[0];
            total[1] += p[1];
        }
        let n = self.states.len() as f64;
        Ok([total[0] / n, total[1] / n])
    }

    /// Upper end of every bracket: no user is active at this price.
    fn silent_price(&self) -> f64 {
        let max_gain = self
            .effective
            .iter()
            .flat_map(|s| s.as_array())
            .fold(0.0, f64::max);
        2.0 * max_gain + 1.0
    }
}

fn set(duals: &DualVars, k: usize, value: f64) -> DualVars {
    let mut d = *duals;
    if k == 0 {
        d.lambda1 = value;
    } else {
        d.lambda2 = value;
    }
    d
}

fn get(duals: &DualVars, k: usize) -> f64 {
    if k == 0 {
        duals.lambda1
    } else {
        duals.lambda2
    }
}

/// Solves `E_k(λ_k) = budget` for one coordinate. Returns the multiplier,
/// the realized powers there, and whether the constraint is slack.
fn solve_coordinate(
    batch: &FrozenBatch,
    duals: &DualVars,
    k: usize,
    budget: f64,
    tol: f64,
) -> Result<(f64, [f64; 2], bool)> {
    let power_at = |lambda: f64| batch.average_power(&set(duals, k, lambda));
    let hit = |e: f64| (e - budget).abs() <= tol * budget;

    // Bracket around the current value, widening by ×16 per step.
    let start = get(duals, k);
    let ceiling = batch.silent_price().max(start);
    let mut hi = (start * 4.0).min(ceiling);
    let mut e_hi = power_at(hi)?;
    if hit(e_hi[k]) {
        return Ok((hi, e_hi, false));
    }
    while e_hi[k] > budget {
        if hi >= ceiling {
            break;
        }
        hi = (hi * 16.0).min(ceiling);
        e_hi = power_at(hi)?;
        if hit(e_hi[k]) {
            return Ok((hi, e_hi, false));
        }
    }
    let mut lo = (start / 4.0).min(hi / 4.0);
    let mut e_lo = power_at(lo)?;
    while e_lo[k] < budget {
        if hit(e_lo[k]) {
            return Ok((lo, e_lo, false));
        }
        if lo <= LAMBDA_FLOOR {
            return Ok((lo, e_lo, true));
        }
        hi = lo;
        e_hi = e_lo;
        lo = (lo / 100.0).max(LAMBDA_FLOOR);
        e_lo = power_at(lo)?;
    }
    if hit(e_lo[k]) {
        return Ok((lo, e_lo, false));
    }

    // Illinois regula falsi on f(u) = E(e^u) − budget, u = ln λ.
    let (mut u_lo, mut u_hi) = (lo.ln(), hi.ln());
    let (mut f_lo, mut f_hi) = (e_lo[k] - budget, e_hi[k] - budget);
    let mut side = 0i8;
    let mut best = if f_hi.abs() < f_lo.abs() {
        (hi, e_hi)
    } else {
        (lo, e_lo)
    };
    for _ in 0..200 {
        let mut u = u_hi - f_hi * (u_hi - u_lo) / (f_hi - f_lo);
        if !(u > u_lo && u < u_hi) {
            u = 0.5 * (u_lo + u_hi);
        }
        let lambda = u.exp();
        let e = power_at(lambda)?;
        let f = e[k] - budget;
        if f.abs() < (best.1[k] - budget).abs() {
            best = (lambda, e);
        }
        if hit(e[k]) {
            return Ok((lambda, e, false));
        }
        if f > 0.0 {
            u_lo = u;
            f_lo = f;
            if side == 1 {
                f_hi *= 0.5;
            }
            side = 1;
        } else {
            u_hi = u;
            f_hi = f;
            if side == -1 {
                f_lo *= 0.5;
            }
            side = -1;
        }
        if u_hi - u_lo <= 1e-13 * u_hi.abs().max(1.0) {
            break;
        }
    }
    // The average power jumps across the budget; settle on the closest value.
    Ok((best.0, best.1, false))
}

/// Multipliers meeting both budgets on a frozen batch of `n` states.
pub fn dual_search(
    params: &FadingParams,
    budget: &PowerBudget,
    scheme: DualScheme,
    n: usize,
    seed: u64,
    tol: f64,
) -> Result<DualSearchResult> {
    let config = DualSearchConfig {
        n,
        tol,
        ..DualSearchConfig::default()
    };
    dual_search_with(params, budget, scheme, &config, seed)
}

pub fn dual_search_with(
    params: &FadingParams,
    budget: &PowerBudget,
    scheme: DualScheme,
    config: &DualSearchConfig,
    seed: u64,
) -> Result<DualSearchResult> {
    let pbar = budget.as_array();
    if pbar.iter().any(|p| *p <= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "budgets must be > 0, got {pbar:?}"
        )));
    }
    if config.n == 0 || !(config.tol > 0.0) {
        return Err(Error::InvalidArgument(
            "dual search needs n >= 1 and tol > 0".into(),
        ));
    }
    let states = sample_states(params, config.n, seed, config.exec);
    let effective = states.iter().map(EffectiveState::from_channel).collect();
    let batch = FrozenBatch {
        scheme,
        states,
        effective,
        exec: config.exec,
    };

    let mut duals = DualVars::new(1.0 / pbar[0], 1.0 / pbar[1])?;
    let mut realized = [0.0; 2];
    let mut slack = [false; 2];
    for sweep in 1..=config.max_sweeps {
        for k in 0..2 {
            let (lambda, e, s) = solve_coordinate(&batch, &duals, k, pbar[k], config.tol)?;
            duals = set(&duals, k, lambda);
            realized = e;
            slack[k] = s;
        }
        // The last solve moved λ2, so user 1 may have drifted.
        let ok = |k: usize| slack[k] || (realized[k] - pbar[k]).abs() <= config.tol * pbar[k];
        if ok(0) && ok(1) {
            return Ok(DualSearchResult {
                duals,
                realized,
                slack,
                sweeps: sweep,
            });
        }
    }
    Err(Error::DualSearchFailed {
        sweeps: config.max_sweeps,
        realized,
        budget: pbar,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn meets_budget_on_frozen_batch() {
        let params = FadingParams::symmetric(1.0, 0.75).unwrap();
        let budget = PowerBudget::symmetric(10.0).unwrap();
        for scheme in [DualScheme::Esa, DualScheme::EsaCj, DualScheme::GsCjBaseline] {
            let r = dual_search(&params, &budget, scheme, 4000, 3, 1e-3).unwrap();
            for k in 0..2 {
                assert!(
                    r.slack[k] || (r.realized[k] - 10.0).abs() <= 1e-2,
                    "{scheme:?}: {r:?}"
                );
            }
        }
    }

    #[test]
    fn rejects_zero_budget() {
        let params = FadingParams::symmetric(1.0, 0.75).unwrap();
        let budget = PowerBudget::new(0.0, 1.0).unwrap();
        assert!(dual_search(&params, &budget, DualScheme::Esa, 100, 1, 1e-3).is_err());
    }
}
