//! KKT power control for ergodic secret alignment.
//!
//! For fixed multipliers the per-state problem is
//! `max ln(1+h1·P1) + ln(1+h2·P2) − ln(1+g1·P1+g2·P2) − λ1·P1 − λ2·P2`
//! over `P1, P2 ≥ 0`. Stationary points come in four shapes (both off, one
//! user on, both on) and the state space splits into seven cases according to
//! where each user's gain sits relative to its price.

use std::fmt;

use crate::error::{Error, Result};
use crate::montecarlo::{Policy, Realization};
use crate::power::roots::{positive_roots, PolySystem};
use crate::power::{DualVars, EffectiveState};
use crate::rates::PowerDecision;
use crate::sampling::SimRng;

/// Left sides of the two stationarity conditions with zero slack
/// multipliers: `h_k/(1+h_k·P_k) − g_k/(1+g1·P1+g2·P2) − λ_k`.
pub fn esa_kkt_residual(s: &EffectiveState, p1: f64, p2: f64, duals: &DualVars) -> (f64, f64) {
    let eve = 1.0 + s.g1 * p1 + s.g2 * p2;
    (
        s.h1 / (1.0 + s.h1 * p1) - s.g1 / eve - duals.lambda1,
        s.h2 / (1.0 + s.h2 * p2) - s.g2 / eve - duals.lambda2,
    )
}

/// Residuals divided by the size of the terms they are made of.
pub(crate) fn esa_scaled_residual(s: &EffectiveState, p1: f64, p2: f64, duals: &DualVars) -> f64 {
    let eve = 1.0 + s.g1 * p1 + s.g2 * p2;
    let (r1, r2) = esa_kkt_residual(s, p1, p2, duals);
    let scale1 = s.h1 / (1.0 + s.h1 * p1) + s.g1 / eve + duals.lambda1;
    let scale2 = s.h2 / (1.0 + s.h2 * p2) + s.g2 / eve + duals.lambda2;
    (r1.abs() / scale1).max(r2.abs() / scale2)
}

/// Per-state objective (nats) minus the power price.
pub fn esa_lagrangian(s: &EffectiveState, p1: f64, p2: f64, duals: &DualVars) -> f64 {
    (s.h1 * p1).ln_1p() + (s.h2 * p2).ln_1p()
        - (s.g1 * p1 + s.g2 * p2).ln_1p()
        - duals.lambda1 * p1
        - duals.lambda2 * p2
}

/// Root of `h/(1+h·p) − g/(1+g·p) = λ` for `h > g`, clamped at zero.
///
/// Written as `2(h−g−λ) / (λ(h+g) + √(λ²(h+g)² + 4λhg(h−g−λ)))`, which is
/// free of cancellation and also covers `g = 0`.
pub(crate) fn single_user_power(h: f64, g: f64, lambda: f64) -> f64 {
    let excess = h - g - lambda;
    if excess <= 0.0 {
        return 0.0;
    }
    let sum = lambda * (h + g);
    let radicand = sum * sum + 4.0 * lambda * h * g * excess;
    2.0 * excess / (sum + radicand.sqrt())
}

/// User 1's power when user 2 is silent. Requires `h1 > g1`.
pub fn closed_form_p1(s: &EffectiveState, lambda1: f64) -> Result<f64> {
    if s.h1 <= s.g1 {
        return Err(Error::InvalidCase { h: s.h1, g: s.g1 });
    }
    Ok(single_user_power(s.h1, s.g1, lambda1))
}

/// User 2's power when user 1 is silent. Requires `h2 > g2`.
pub fn closed_form_p2(s: &EffectiveState, lambda2: f64) -> Result<f64> {
    closed_form_p1(&s.swapped(), lambda2)
}

/// The two stationarity conditions with denominators cleared:
/// `h1(1+g2·y) − g1 = λ1(1+h1·x)(1+g1·x+g2·y)` and its mirror.
fn esa_system(s: &EffectiveState, d: &DualVars) -> PolySystem {
    let (h1, h2, g1, g2) = (s.h1, s.h2, s.g1, s.g2);
    let (l1, l2) = (d.lambda1, d.lambda2);
    PolySystem {
        a: [h1 - g1 - l1, -l1 * (h1 + g1), -l1 * h1 * g1],
        b: [g2 * (h1 - l1), -g2 * l1 * h1],
        c0: [h2 - g2 - l2, g1 * (h2 - l2)],
        c1: [-l2 * (h2 + g2), -g1 * l2 * h2],
        c2: -l2 * h2 * g2,
    }
}

fn describe(s: &EffectiveState, d: &DualVars) -> String {
    format!(
        "h1={}, h2={}, g1={}, g2={}, lambda1={}, lambda2={}",
        s.h1, s.h2, s.g1, s.g2, d.lambda1, d.lambda2
    )
}

/// Every stationary point with both powers positive.
pub(crate) fn esa_interior_points(s: &EffectiveState, duals: &DualVars) -> Result<Vec<(f64, f64)>> {
    if s.h1 <= duals.lambda1 || s.h2 <= duals.lambda2 {
        return Ok(Vec::new());
    }
    positive_roots(
        &esa_system(s, duals),
        &|x, y| esa_scaled_residual(s, x, y, duals),
        10.0 / duals.min(),
        &|| describe(s, duals),
    )
}

/// The positive common root of the stationarity system. With several roots
/// the one with the largest Lagrangian is returned.
pub fn solve_common_root(s: &EffectiveState, duals: &DualVars) -> Result<Option<(f64, f64)>> {
    let roots = esa_interior_points(s, duals)?;
    Ok(roots.into_iter().max_by(|a, b| {
        esa_lagrangian(s, a.0, a.1, duals).total_cmp(&esa_lagrangian(s, b.0, b.1, duals))
    }))
}

/// All KKT points: boundary points whose inactive multipliers are
/// nonnegative, plus every interior root.
pub fn esa_kkt_points(s: &EffectiveState, duals: &DualVars) -> Result<Vec<(f64, f64)>> {
    let (l1, l2) = (duals.lambda1, duals.lambda2);
    let mut points = Vec::new();
    if s.h1 - s.g1 <= l1 && s.h2 - s.g2 <= l2 {
        points.push((0.0, 0.0));
    }
    if s.h1 - s.g1 > l1 {
        let p1 = single_user_power(s.h1, s.g1, l1);
        if s.h2 - s.g2 / (1.0 + s.g1 * p1) <= l2 {
            points.push((p1, 0.0));
        }
    }
    if s.h2 - s.g2 > l2 {
        let p2 = single_user_power(s.h2, s.g2, l2);
        if s.h1 - s.g1 / (1.0 + s.g2 * p2) <= l1 {
            points.push((0.0, p2));
        }
    }
    points.extend(esa_interior_points(s, duals)?);
    Ok(points)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EsaCase {
    /// Neither user can gain from transmitting alone.
    BothSilent,
    /// Only user 2 clears its threshold; user 1 is priced out.
    OnlySecond,
    OnlyFirst,
    /// Both users are marginal.
    BothMarginal,
    /// User 1 marginal, user 2 strong.
    MarginalFirst,
    MarginalSecond,
    BothStrong,
}

impl EsaCase {
    pub fn label(&self) -> &'static str {
        match self {
            EsaCase::BothSilent => "A.1",
            EsaCase::OnlySecond => "A.2",
            EsaCase::OnlyFirst => "A.3",
            EsaCase::BothMarginal => "A.4",
            EsaCase::MarginalFirst => "A.5",
            EsaCase::MarginalSecond => "A.6",
            EsaCase::BothStrong => "A.7",
        }
    }
}

impl fmt::Display for EsaCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EsaDecision {
    pub p1: f64,
    pub p2: f64,
    pub case: EsaCase,
    /// The case allowed a common root but none was found.
    pub fallback: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Level {
    /// `h ≤ λ`: never transmits.
    Off,
    /// `λ < h ≤ λ + g`: transmits only if the other user is on.
    Marginal,
    /// `h − g > λ`: always transmits.
    Strong,
}

fn level(h: f64, g: f64, lambda: f64) -> Level {
    if h <= lambda {
        Level::Off
    } else if h - g > lambda {
        Level::Strong
    } else {
        Level::Marginal
    }
}

/// Case-tree power control for one effective state.
pub fn esa_case_policy(s: &EffectiveState, duals: &DualVars) -> Result<EsaDecision> {
    use Level::*;
    let (l1, l2) = (duals.lambda1, duals.lambda2);
    let lone1 = || single_user_power(s.h1, s.g1, l1);
    let lone2 = || single_user_power(s.h2, s.g2, l2);
    let decided = |p1, p2, case| {
        Ok(EsaDecision {
            p1,
            p2,
            case,
            fallback: false,
        })
    };
    let with_root = |case: EsaCase, fallback: (f64, f64)| -> Result<EsaDecision> {
        match solve_common_root(s, duals) {
            Ok(Some((p1, p2))) => decided(p1, p2, case),
            Ok(None) => Ok(EsaDecision {
                p1: fallback.0,
                p2: fallback.1,
                case,
                fallback: true,
            }),
            Err(e) => {
                log::warn!("case {case}: {e}; using the single-user fallback");
                Ok(EsaDecision {
                    p1: fallback.0,
                    p2: fallback.1,
                    case,
                    fallback: true,
                })
            }
        }
    };
    match (level(s.h1, s.g1, l1), level(s.h2, s.g2, l2)) {
        (Off, Off) | (Off, Marginal) | (Marginal, Off) => decided(0.0, 0.0, EsaCase::BothSilent),
        (Off, Strong) => decided(0.0, lone2(), EsaCase::OnlySecond),
        (Strong, Off) => decided(lone1(), 0.0, EsaCase::OnlyFirst),
        (Marginal, Marginal) => with_root(EsaCase::BothMarginal, (0.0, 0.0)),
        (Marginal, Strong) => with_root(EsaCase::MarginalFirst, (0.0, lone2())),
        (Strong, Marginal) => with_root(EsaCase::MarginalSecond, (lone1(), 0.0)),
        (Strong, Strong) => match solve_common_root(s, duals) {
            Ok(Some((p1, p2))) => decided(p1, p2, EsaCase::BothStrong),
            Ok(None) | Err(Error::NonConvergence { .. }) => Err(Error::MissingRoot {
                case: EsaCase::BothStrong.label().to_string(),
                state: describe(s, duals),
            }),
            Err(e) => Err(e),
        },
    }
}

/// ESA power control at fixed multipliers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EsaKktPolicy {
    pub duals: DualVars,
}

impl Policy for EsaKktPolicy {
    fn decide(&self, realization: &Realization, _: &mut SimRng) -> Result<PowerDecision> {
        let s = EffectiveState::from_channel(realization.current());
        let d = esa_case_policy(&s, &self.duals)?;
        Ok(PowerDecision::transmit(d.p1, d.p2))
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

    /// The closed form exactly as it is usually printed.
    fn textbook_power(h: f64, g: f64, lambda: f64) -> f64 {
        let d = 1.0 / g - 1.0 / h;
        0.5 * ((d * d + 4.0 / lambda * d).sqrt() - (1.0 / g + 1.0 / h))
    }

    #[test]
    fn closed_form_example() {
        let s = st(2.0, 0.0, 1.0, 0.0);
        let p = closed_form_p1(&s, 0.5).unwrap();
        assert!((p - 0.5 * (4.25f64.sqrt() - 1.5)).abs() < 1e-14);
        assert!((p - textbook_power(2.0, 1.0, 0.5)).abs() < 1e-14);
        let (r1, _) = esa_kkt_residual(&s, p, 0.0, &duals(0.5, 1.0));
        assert!(r1.abs() < 1e-12);
    }

    #[test]
    fn closed_form_boundary_and_errors() {
        let s = st(2.0, 3.0, 1.0, 1.0);
        assert_eq!(closed_form_p1(&s, 1.0).unwrap(), 0.0);
        assert!(matches!(
            closed_form_p1(&st(1.0, 0.0, 1.0, 0.0), 0.1),
            Err(Error::InvalidCase { .. })
        ));
        assert!(closed_form_p2(&st(5.0, 1.0, 1.0, 2.0), 0.1).is_err());
        assert!(closed_form_p2(&s, 0.5).unwrap() > 0.0);
    }

    #[test]
    fn closed_form_without_eavesdropper() {
        let p = single_user_power(4.0, 0.0, 0.5);
        assert!((p - (1.0 / 0.5 - 1.0 / 4.0)).abs() < 1e-14);
    }

    #[test]
    fn boundary_stationarity() {
        let s = st(3.0, 1.0, 1.0, 0.5);
        let (r1, _) = esa_kkt_residual(&s, 0.0, 0.0, &duals(2.0, 1.0));
        assert_eq!(r1, 0.0);
    }

    #[test]
    fn symmetric_common_root() {
        // 0.6 p² − 2.5 p − 1.9 = 0
        let expected = (2.5 + (2.5f64 * 2.5 + 4.0 * 0.6 * 1.9).sqrt()) / 1.2;
        let s = st(3.0, 3.0, 1.0, 1.0);
        let (p1, p2) = solve_common_root(&s, &duals(0.1, 0.1)).unwrap().unwrap();
        assert!((p1 - expected).abs() < 1e-9, "{p1}");
        assert!((p2 - expected).abs() < 1e-9, "{p2}");
        let d = esa_case_policy(&s, &duals(0.1, 0.1)).unwrap();
        assert_eq!(d.case, EsaCase::BothStrong);
        assert!((d.p1 - expected).abs() < 1e-9);
    }

    #[test]
    fn no_root_when_priced_out() {
        let s = st(3.0, 3.0, 1.0, 1.0);
        assert_eq!(solve_common_root(&s, &duals(4.0, 4.0)).unwrap(), None);
    }

    #[test]
    fn case_labels() {
        let d = esa_case_policy(&st(0.5, 1.2, 0.1, 1.0), &duals(1.0, 0.5)).unwrap();
        assert_eq!((d.p1, d.p2, d.case.label()), (0.0, 0.0, "A.1"));
        let d = esa_case_policy(&st(2.0, 0.2, 1.0, 0.1), &duals(0.5, 0.5)).unwrap();
        assert_eq!(d.case.label(), "A.3");
        assert!((d.p1 - 0.280_776_406_404_415).abs() < 1e-12);
        assert_eq!(d.p2, 0.0);
    }
}
