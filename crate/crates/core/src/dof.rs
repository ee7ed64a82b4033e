//! High-SNR scaling experiments.
//!
//! The secure degrees of freedom of a scheme are the slope of its ergodic
//! sum rate against `log2 P` as `P → ∞`. Curves are measured on a
//! log-spaced power grid with a symmetric budget `P̄1 = P̄2 = P` and the slope
//! is fitted over the top of the grid.

use std::ops::Range;

use crate::error::{Error, Result};
use crate::experiment::{evaluate_point, PointSpec, PolicyChoice};
use crate::fading::{sample_state, ChannelState, FadingParams, SbaBlock};
use crate::montecarlo::Scheme;
use crate::policy::sba_candidate_powers;
use crate::rates::{log2_1p, rates_esa, rates_sba, PowerBudget};
use crate::sampling::{derive_seed, map_batches, Exec, Moments};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub power: f64,
    pub rsum: f64,
    pub stderr: f64,
    pub n: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SumRateCurve {
    pub scheme: Scheme,
    pub policy: PolicyChoice,
    pub params: FadingParams,
    pub points: Vec<CurvePoint>,
}

/// `count` powers from `10^lo_exp` to `10^hi_exp`, evenly spaced in log.
pub fn log_grid(lo_exp: f64, hi_exp: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![10f64.powf(lo_exp)];
    }
    (0..count)
        .map(|i| 10f64.powf(lo_exp + (hi_exp - lo_exp) * i as f64 / (count - 1) as f64))
        .collect()
}

/// Ergodic sum rate at each power; point `i` uses seed `derive_seed(seed, i)`.
pub fn sum_rate_curve(
    scheme: Scheme,
    params: &FadingParams,
    powers: &[f64],
    policy: PolicyChoice,
    n: usize,
    seed: u64,
    exec: Exec,
) -> Result<SumRateCurve> {
    if powers.is_empty() || powers.windows(2).any(|w| !(w[1] > w[0])) || !(powers[0] > 0.0) {
        return Err(Error::InvalidArgument(
            "powers must be positive and strictly increasing".into(),
        ));
    }
    let mut points = Vec::with_capacity(powers.len());
    for (i, &power) in powers.iter().enumerate() {
        let spec = PointSpec {
            scheme,
            policy,
            params: *params,
            budget: PowerBudget::symmetric(power)?,
            n,
            seed: derive_seed(seed, i as u64),
        };
        let est = evaluate_point(&spec, exec)?.estimate;
        points.push(CurvePoint {
            power,
            rsum: est.mean.rsum,
            stderr: est.stderr.rsum,
            n: est.n,
        });
    }
    Ok(SumRateCurve {
        scheme,
        policy,
        params: *params,
        points,
    })
}

/// Least-squares slope of the sum rate against `log2 P` over `window`.
pub fn estimate_dof(curve: &SumRateCurve, window: Range<usize>) -> Result<f64> {
    let pts = curve.points.get(window.clone()).ok_or_else(|| {
        Error::InvalidArgument(format!(
            "window {window:?} exceeds {} curve points",
            curve.points.len()
        ))
    })?;
    if pts.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "slope window needs >= 3 points, got {}",
            pts.len()
        )));
    }
    let xs: Vec<f64> = pts.iter().map(|p| p.power.log2()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = pts.iter().map(|p| p.rsum).sum::<f64>() / n;
    let sxy: f64 = xs
        .iter()
        .zip(pts)
        .map(|(x, p)| (x - mx) * (p.rsum - my))
        .sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}

/// Slope over the top `k` points of the curve (default window: 4).
pub fn estimate_dof_top(curve: &SumRateCurve, k: usize) -> Result<f64> {
    let len = curve.points.len();
    estimate_dof(curve, len.saturating_sub(k)..len)
}

/// Bracketed SBA sum-rate term (without the ½) at the scaling-experiment
/// powers `P1 = P/(2 var_g2)`, `P2 = P/(2 var_g1)`.
pub fn sba_scaling_integrand(block: &SbaBlock, params: &FadingParams, power: f64) -> f64 {
    let budget = PowerBudget::symmetric(power).expect("power must be >= 0");
    let (p1, p2) = sba_candidate_powers(&budget, params);
    2.0 * rates_sba(block, p1, p2).rsum
}

/// Bracketed ESA sum-rate term (without the ½) at `P1 = P2 = P`.
pub fn esa_scaling_integrand(state: &ChannelState, power: f64) -> f64 {
    2.0 * rates_esa(state, power, power).rsum
}

/// Integrable majorant of `sba_scaling_integrand / log2 P` for large `P`.
pub fn dominated_bound_sba(block: &SbaBlock, params: &FadingParams) -> f64 {
    let (v1, v2) = (params.var_g1(), params.var_g2());
    let (o, e) = (&block.odd, &block.even);
    let mains: f64 = [o.h1, o.h2, e.h1, e.h2]
        .iter()
        .map(|g| log2_1p(g.norm_sqr()))
        .sum();
    let eves: f64 = [o.g1, o.g2, e.g1, e.g2]
        .iter()
        .map(|g| log2_1p(g.norm_sqr()))
        .sum();
    4.0 + 2.0 * (log2_1p(1.0 / v1) + log2_1p(1.0 / v2))
        + log2_1p((v1 + v2) / (v1 * v2))
        + 3.0 * mains
        + 4.0 * eves
}

/// Integrable majorant of `esa_scaling_integrand / log2 P` for large `P`.
pub fn dominated_bound_esa(state: &ChannelState) -> f64 {
    let g = state.power_gains();
    6.0 + log2_1p(2.0 * g.h1) + log2_1p(2.0 * g.h2) + log2_1p(2.0 * (g.g1 + g.g2))
}

/// Finite-rate bound for GS/CJ at one state: depends on which users are
/// stronger at the main receiver, zero when neither is.
pub fn gs_cj_bound_integrand(state: &ChannelState) -> f64 {
    let g = state.power_gains();
    let (a1, a2, b1, b2) = (g.h1, g.h2, g.g1, g.g2);
    match (a1 > b1, a2 > b2) {
        (true, true) => log2_1p(a1 / b1) + log2_1p(a2 / b2),
        (true, false) => 1.0 + log2_1p(a1 / b1) + log2_1p(b2 / a2),
        (false, true) => 1.0 + log2_1p(a2 / b2) + log2_1p(b1 / a1),
        (false, false) => 0.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n: u64,
}

/// Monte Carlo estimate of the GS/CJ sum-rate bound, a constant independent
/// of the power budget.
pub fn gs_cj_upper_bound(
    params: &FadingParams,
    n: usize,
    seed: u64,
    exec: Exec,
) -> Result<BoundEstimate> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 samples, got {n}"
        )));
    }
    let parts = map_batches(n, seed, exec, |range, rng| {
        let mut m = Moments::default();
        for _ in range {
            m.push(gs_cj_bound_integrand(&sample_state(params, rng)));
        }
        m
    });
    let mut total = Moments::default();
    for p in &parts {
        total.merge(p);
    }
    Ok(BoundEstimate {
        mean: total.mean,
        stderr: total.stderr(),
        n: total.n,
    })
}
