//! KKT power control for ergodic secret alignment with cooperative jamming.
//!
//! Each user either transmits (`P_k`) or jams (`Q_k`), never both. A user
//! whose main gain beats its eavesdropper gain never jams, so the state space
//! splits four ways on `h_k` versus `g_k`:
//!
//! 1. both stronger at the main receiver: plain ESA control, no jamming;
//! 2. only user 1 stronger: user 1 may transmit, user 2 may jam;
//! 3. the mirror of 2;
//! 4. both weaker: at most one transmits while the other jams, and when both
//!    arrangements are stationary the one with the larger instantaneous sum
//!    rate is used.

use std::fmt;

use crate::error::{Error, Result};
use crate::montecarlo::{Policy, Realization};
use crate::power::esa::{esa_case_policy, esa_interior_points, single_user_power, EsaCase};
use crate::power::roots::{positive_roots, PolySystem};
use crate::power::{DualVars, EffectiveState};
use crate::rates::{rates_esa_cj, PowerDecision};
use crate::sampling::SimRng;

/// Left sides of the four stationarity conditions (for `P1, P2, Q1, Q2`)
/// with zero slack multipliers.
pub fn esa_cj_kkt_residual(s: &EffectiveState, d: &PowerDecision, duals: &DualVars) -> [f64; 4] {
    let (t1, t2) = (d.p1 + d.q1, d.p2 + d.q2);
    let eve_total = 1.0 + s.g1 * t1 + s.g2 * t2;
    let eve_jam = 1.0 + s.g1 * d.q1 + s.g2 * d.q2;
    let main1 = s.h1 / (1.0 + s.h1 * t1);
    let main2 = s.h2 / (1.0 + s.h2 * t2);
    let res_p1 = main1 - s.g1 / eve_total - duals.lambda1;
    let res_p2 = main2 - s.g2 / eve_total - duals.lambda2;
    let res_q1 =
        main1 - s.g1 / eve_total + s.g1 / eve_jam - s.h1 / (1.0 + s.h1 * d.q1) - duals.lambda1;
    let res_q2 =
        main2 - s.g2 / eve_total + s.g2 / eve_jam - s.h2 / (1.0 + s.h2 * d.q2) - duals.lambda2;
    [res_p1, res_p2, res_q1, res_q2]
}

/// Per-state objective (nats) minus the power price.
pub fn esa_cj_lagrangian(s: &EffectiveState, d: &PowerDecision, duals: &DualVars) -> f64 {
    let (t1, t2) = (d.p1 + d.q1, d.p2 + d.q2);
    (s.h1 * t1).ln_1p() - (s.h1 * d.q1).ln_1p() + (s.h2 * t2).ln_1p()
        - (s.h2 * d.q2).ln_1p()
        - (s.g1 * t1 + s.g2 * t2).ln_1p()
        + (s.g1 * d.q1 + s.g2 * d.q2).ln_1p()
        - duals.lambda1 * t1
        - duals.lambda2 * t2
}

fn describe(s: &EffectiveState, d: &DualVars) -> String {
    format!(
        "h1={}, h2={}, g1={}, g2={}, lambda1={}, lambda2={}",
        s.h1, s.h2, s.g1, s.g2, d.lambda1, d.lambda2
    )
}

/// User 1 transmits (`x = P1`), user 2 jams (`y = Q2`):
/// `h1(1+g2·y) − g1 = λ1(1+h1·x)(1+g1·x+g2·y)` and
/// `g1·g2·x = λ2(1+g2·y)(1+g1·x+g2·y)`.
fn transmit_jam_system(s: &EffectiveState, d: &DualVars) -> PolySystem {
    let (h1, g1, g2) = (s.h1, s.g1, s.g2);
    let (l1, l2) = (d.lambda1, d.lambda2);
    PolySystem {
        a: [h1 - g1 - l1, -l1 * (h1 + g1), -l1 * h1 * g1],
        b: [g2 * (h1 - l1), -g2 * l1 * h1],
        c0: [-l2, g1 * (g2 - l2)],
        c1: [-2.0 * l2 * g2, -l2 * g2 * g1],
        c2: -l2 * g2 * g2,
    }
}

fn transmit_jam_scaled_residual(s: &EffectiveState, p1: f64, q2: f64, d: &DualVars) -> f64 {
    let eve_total = 1.0 + s.g1 * p1 + s.g2 * q2;
    let eve_jam = 1.0 + s.g2 * q2;
    let main = s.h1 / (1.0 + s.h1 * p1);
    let r1 = main - s.g1 / eve_total - d.lambda1;
    let r2 = s.g2 / eve_jam - s.g2 / eve_total - d.lambda2;
    let scale1 = main + s.g1 / eve_total + d.lambda1;
    let scale2 = s.g2 / eve_jam + s.g2 / eve_total + d.lambda2;
    (r1.abs() / scale1).max(r2.abs() / scale2)
}

/// Every stationary `(P1, Q2)` with both positive.
fn transmit_jam_points(s: &EffectiveState, duals: &DualVars) -> Result<Vec<(f64, f64)>> {
    if s.h1 <= duals.lambda1 || s.g2 <= duals.lambda2 {
        return Ok(Vec::new());
    }
    positive_roots(
        &transmit_jam_system(s, duals),
        &|x, y| transmit_jam_scaled_residual(s, x, y, duals),
        10.0 / duals.min(),
        &|| describe(s, duals),
    )
}

/// Positive `(P1, Q2)` with user 2 jamming for user 1. With several roots the
/// one with the largest Lagrangian is returned.
pub fn solve_p1q2(s: &EffectiveState, duals: &DualVars) -> Result<Option<(f64, f64)>> {
    let roots = transmit_jam_points(s, duals)?;
    let value =
        |r: &(f64, f64)| esa_cj_lagrangian(s, &PowerDecision::new(r.0, 0.0, 0.0, r.1), duals);
    Ok(roots
        .into_iter()
        .max_by(|a, b| value(a).total_cmp(&value(b))))
}

/// Positive `(P2, Q1)` with user 1 jamming for user 2.
pub fn solve_p2q1(s: &EffectiveState, duals: &DualVars) -> Result<Option<(f64, f64)>> {
    solve_p1q2(&s.swapped(), &duals.swapped())
}

/// Whether `d` is a KKT point: active conditions hold and no inactive
/// variable would profit from becoming positive.
fn is_kkt_point(s: &EffectiveState, d: &PowerDecision, duals: &DualVars) -> bool {
    let res = esa_cj_kkt_residual(s, d, duals);
    let vars = [d.p1, d.p2, d.q1, d.q2];
    let scale = s
        .as_array()
        .iter()
        .fold(duals.lambda1 + duals.lambda2, |a, b| a + b);
    vars.iter().zip(res).all(|(&v, r)| {
        if v > 0.0 {
            r.abs() <= 1e-8 * scale
        } else {
            r <= 1e-12 * scale
        }
    })
}

/// Every no-splitting KKT point of the per-state problem.
pub fn esa_cj_kkt_points(s: &EffectiveState, duals: &DualVars) -> Result<Vec<PowerDecision>> {
    let (l1, l2) = (duals.lambda1, duals.lambda2);
    let mut candidates = vec![PowerDecision::ZERO];
    if s.h1 > s.g1 + l1 {
        candidates.push(PowerDecision::transmit(
            single_user_power(s.h1, s.g1, l1),
            0.0,
        ));
    }
    if s.h2 > s.g2 + l2 {
        candidates.push(PowerDecision::transmit(
            0.0,
            single_user_power(s.h2, s.g2, l2),
        ));
    }
    for (p1, p2) in esa_interior_points(s, duals)? {
        candidates.push(PowerDecision::transmit(p1, p2));
    }
    for (p1, q2) in transmit_jam_points(s, duals)? {
        candidates.push(PowerDecision::new(p1, 0.0, 0.0, q2));
    }
    for (p2, q1) in transmit_jam_points(&s.swapped(), &duals.swapped())? {
        candidates.push(PowerDecision::new(0.0, p2, q1, 0.0));
    }
    Ok(candidates
        .into_iter()
        .filter(|d| is_kkt_point(s, d, duals))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CjBranch {
    /// Both users stronger at the main receiver; ESA case attached.
    NoJamming(EsaCase),
    /// User 1 stronger, user 2 weaker; sub-case `'a'..='d'`.
    FirstTransmits(char),
    /// Mirror of [`CjBranch::FirstTransmits`].
    SecondTransmits(char),
    /// Both weaker; sub-case `'a'..='d'`.
    BothWeak(char),
}

impl CjBranch {
    pub fn label(&self) -> String {
        match self {
            CjBranch::NoJamming(case) => format!("B.1/{}", case.label()),
            CjBranch::FirstTransmits(c) => format!("B.2{c}"),
            CjBranch::SecondTransmits(c) => format!("B.3{c}"),
            CjBranch::BothWeak(c) => format!("B.4{c}"),
        }
    }

    fn mirrored(self) -> Self {
        match self {
            CjBranch::FirstTransmits(c) => CjBranch::SecondTransmits(c),
            CjBranch::SecondTransmits(c) => CjBranch::FirstTransmits(c),
            other => other,
        }
    }
}

impl fmt::Display for CjBranch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CjDecision {
    pub decision: PowerDecision,
    pub branch: CjBranch,
    /// A common root was allowed but none exists, so the simpler decision was used.
    pub fallback: bool,
}

fn swap_decision(d: &PowerDecision) -> PowerDecision {
    PowerDecision::new(d.p2, d.p1, d.q2, d.q1)
}

fn with_context(e: Error, branch: &str, s: &EffectiveState, duals: &DualVars) -> Error {
    match e {
        Error::NonConvergence { context } => Error::NonConvergence {
            context: format!("branch {branch}: {context} ({})", describe(s, duals)),
        },
        other => other,
    }
}

/// User 1 may transmit, user 2 may jam; `P2 = Q1 = 0`.
fn first_transmits(s: &EffectiveState, duals: &DualVars) -> Result<CjDecision> {
    let (l1, l2) = (duals.lambda1, duals.lambda2);
    let strong = s.h1 - s.g1 > l1;
    let jam_pays = s.g2 > l2;
    let done = |d: PowerDecision, c: char, fallback: bool| CjDecision {
        decision: d,
        branch: CjBranch::FirstTransmits(c),
        fallback,
    };
    if s.h1 <= l1 || (!strong && !jam_pays) {
        return Ok(done(PowerDecision::ZERO, 'a', false));
    }
    if strong && !jam_pays {
        return Ok(done(
            PowerDecision::transmit(single_user_power(s.h1, s.g1, l1), 0.0),
            'b',
            false,
        ));
    }
    let sub = if strong { 'd' } else { 'c' };
    let root = solve_p1q2(s, duals).map_err(|e| with_context(e, &format!("B.2{sub}"), s, duals))?;
    Ok(match root {
        Some((p1, q2)) => done(PowerDecision::new(p1, 0.0, 0.0, q2), sub, false),
        None if strong => done(
            PowerDecision::transmit(single_user_power(s.h1, s.g1, l1), 0.0),
            sub,
            true,
        ),
        None => done(PowerDecision::ZERO, sub, true),
    })
}

fn both_weak(s: &EffectiveState, duals: &DualVars) -> Result<CjDecision> {
    let (l1, l2) = (duals.lambda1, duals.lambda2);
    let first_can = s.h1 > l1 && s.g2 > l2;
    let second_can = s.h2 > l2 && s.g1 > l1;
    let done = |d: PowerDecision, c: char, fallback: bool| CjDecision {
        decision: d,
        branch: CjBranch::BothWeak(c),
        fallback,
    };
    let ctx = |c: char| move |e: Error| with_context(e, &format!("B.4{c}"), s, duals);
    let sub = match (first_can, second_can) {
        (false, false) => return Ok(done(PowerDecision::ZERO, 'a', false)),
        (true, false) => 'b',
        (false, true) => 'c',
        (true, true) => 'd',
    };
    let a = if first_can {
        solve_p1q2(s, duals).map_err(ctx(sub))?
    } else {
        None
    };
    let b = if second_can {
        solve_p2q1(s, duals).map_err(ctx(sub))?
    } else {
        None
    };
    let da = a.map(|(p1, q2)| PowerDecision::new(p1, 0.0, 0.0, q2));
    let db = b.map(|(p2, q1)| PowerDecision::new(0.0, p2, q1, 0.0));
    Ok(match (da, db) {
        (Some(x), None) => done(x, sub, false),
        (None, Some(y)) => done(y, sub, false),
        (None, None) => done(PowerDecision::ZERO, sub, true),
        (Some(x), Some(y)) => {
            let channel = s.to_channel();
            if rates_esa_cj(&channel, &x).rsum >= rates_esa_cj(&channel, &y).rsum {
                done(x, sub, false)
            } else {
                done(y, sub, false)
            }
        }
    })
}

/// Case-tree power control with cooperative jamming for one effective state.
///
/// Ties `h_k = g_k` are treated as "stronger".
pub fn esa_cj_case_policy(s: &EffectiveState, duals: &DualVars) -> Result<CjDecision> {
    match (s.h1 >= s.g1, s.h2 >= s.g2) {
        (true, true) => {
            let d = esa_case_policy(s, duals)?;
            Ok(CjDecision {
                decision: PowerDecision::transmit(d.p1, d.p2),
                branch: CjBranch::NoJamming(d.case),
                fallback: d.fallback,
            })
        }
        (true, false) => first_transmits(s, duals),
        (false, true) => {
            let d = first_transmits(&s.swapped(), &duals.swapped())?;
            Ok(CjDecision {
                decision: swap_decision(&d.decision),
                branch: d.branch.mirrored(),
                fallback: d.fallback,
            })
        }
        (false, false) => both_weak(s, duals),
    }
}

/// ESA/CJ power control at fixed multipliers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EsaCjKktPolicy {
    pub duals: DualVars,
}

impl Policy for EsaCjKktPolicy {
    fn decide(&self, realization: &Realization, _: &mut SimRng) -> Result<PowerDecision> {
        let s = EffectiveState::from_channel(realization.current());
        Ok(esa_cj_case_policy(&s, &self.duals)?.decision)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(h1: f64, h2: f64, g1: f64, g2: f64) -> EffectiveState {
        EffectiveState::new(h1, h2, g1, g2).unwrap()
    }

    fn duals(l1: f64, l2: f64) -> DualVars {
        DualVars::new(l1, l2).unwrap()
    }

    #[test]
    fn strong_users_do_not_jam() {
        let d = esa_cj_case_policy(&st(3.0, 3.0, 1.0, 1.0), &duals(0.1, 0.1)).unwrap();
        assert_eq!((d.decision.q1, d.decision.q2), (0.0, 0.0));
        assert_eq!(d.branch.label(), "B.1/A.7");
    }

    #[test]
    fn priced_out_first_user() {
        let d = esa_cj_case_policy(&st(0.5, 0.1, 0.2, 4.0), &duals(1.0, 0.05)).unwrap();
        assert_eq!(d.decision, PowerDecision::ZERO);
        assert_eq!(d.branch.label(), "B.2a");
    }

    #[test]
    fn transmit_jam_root() {
        let s = st(5.0, 0.1, 1.0, 4.0);
        let du = duals(0.05, 0.05);
        let (p1, q2) = solve_p1q2(&s, &du).unwrap().unwrap();
        assert!(p1 > 0.0 && q2 > 0.0);
        let res = esa_cj_kkt_residual(&s, &PowerDecision::new(p1, 0.0, 0.0, q2), &du);
        assert!(res[0].abs() < 1e-9 && res[3].abs() < 1e-9, "{res:?}");
        let d = esa_cj_case_policy(&s, &du).unwrap();
        assert_eq!(d.branch.label(), "B.2d");
        assert_eq!(d.decision, PowerDecision::new(p1, 0.0, 0.0, q2));
    }

    #[test]
    fn jamming_priced_out() {
        assert_eq!(
            solve_p1q2(&st(5.0, 0.1, 1.0, 4.0), &duals(0.05, 4.0)).unwrap(),
            None
        );
    }

    #[test]
    fn mirror_matches_swap() {
        let s = st(0.1, 5.0, 4.0, 1.0);
        let du = duals(0.05, 0.05);
        let d = esa_cj_case_policy(&s, &du).unwrap();
        let m = esa_cj_case_policy(&s.swapped(), &du.swapped()).unwrap();
        assert_eq!(d.decision, swap_decision(&m.decision));
        assert_eq!(d.branch.label(), "B.3d");
    }
}
