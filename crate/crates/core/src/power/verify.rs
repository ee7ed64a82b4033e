//! Checks that a power decision is a valid output of the case trees:
//! stationarity of the active variables, the positivity conditions, no
//! splitting, and no jamming by users that are stronger at the main
//! receiver. Each function returns a list of human-readable violations.

use crate::power::cj::esa_cj_kkt_residual;
use crate::power::esa::esa_kkt_residual;
use crate::power::{DualVars, EffectiveState};
use crate::rates::PowerDecision;

/// Violations of an ESA decision `(p1, p2)`.
pub fn esa_violations(
    s: &EffectiveState,
    p1: f64,
    p2: f64,
    duals: &DualVars,
    tol: f64,
) -> Vec<String> {
    let mut out = Vec::new();
    if !(p1 >= 0.0 && p2 >= 0.0) {
        out.push(format!("negative power ({p1}, {p2})"));
        return out;
    }
    let (r1, r2) = esa_kkt_residual(s, p1, p2, duals);
    if p1 > 0.0 && r1.abs() > tol {
        out.push(format!("P1 stationarity residual {r1:e}"));
    }
    if p2 > 0.0 && r2.abs() > tol {
        out.push(format!("P2 stationarity residual {r2:e}"));
    }
    let on1 = s.h1 - s.g1 / (1.0 + s.g2 * p2) > duals.lambda1;
    let on2 = s.h2 - s.g2 / (1.0 + s.g1 * p1) > duals.lambda2;
    if (p1 > 0.0) != on1 {
        out.push(format!("P1 = {p1} but positivity condition is {on1}"));
    }
    if (p2 > 0.0) != on2 {
        out.push(format!("P2 = {p2} but positivity condition is {on2}"));
    }
    out
}

/// Violations of an ESA/CJ decision.
pub fn esa_cj_violations(
    s: &EffectiveState,
    d: &PowerDecision,
    duals: &DualVars,
    tol: f64,
) -> Vec<String> {
    let mut out = Vec::new();
    if d.validate().is_err() {
        out.push(format!("negative power {d:?}"));
        return out;
    }
    if d.p1 > 0.0 && d.q1 > 0.0 || d.p2 > 0.0 && d.q2 > 0.0 {
        out.push(format!("a user both transmits and jams: {d:?}"));
    }
    if s.h1 > s.g1 && d.q1 != 0.0 || s.h2 > s.g2 && d.q2 != 0.0 {
        out.push(format!("a user stronger at the main receiver jams: {d:?}"));
    }
    let res = esa_cj_kkt_residual(s, d, duals);
    for (name, v, r) in [
        ("P1", d.p1, res[0]),
        ("P2", d.p2, res[1]),
        ("Q1", d.q1, res[2]),
        ("Q2", d.q2, res[3]),
    ] {
        if v > 0.0 && r.abs() > tol {
            out.push(format!("{name} stationarity residual {r:e}"));
        }
    }
    let (l1, l2) = (duals.lambda1, duals.lambda2);
    if d.q1 == 0.0 && d.q2 == 0.0 {
        out.extend(
            esa_violations(s, d.p1, d.p2, duals, tol)
                .into_iter()
                .filter(|v| v.contains("positivity")),
        );
    }
    if d.p2 == 0.0 && d.q1 == 0.0 {
        let p1_on = s.h1 - s.g1 / (1.0 + s.g2 * d.q2) > l1;
        let q2_on = s.g2 - s.g2 / (1.0 + s.g1 * d.p1) > l2;
        if (d.p1 > 0.0) != p1_on {
            out.push(format!("P1 = {} but positivity condition is {p1_on}", d.p1));
        }
        if (d.q2 > 0.0) != q2_on {
            out.push(format!("Q2 = {} but positivity condition is {q2_on}", d.q2));
        }
    }
    if d.p1 == 0.0 && d.q2 == 0.0 {
        let p2_on = s.h2 - s.g2 / (1.0 + s.g1 * d.q1) > l2;
        let q1_on = s.g1 - s.g1 / (1.0 + s.g2 * d.p2) > l1;
        if (d.p2 > 0.0) != p2_on {
            out.push(format!("P2 = {} but positivity condition is {p2_on}", d.p2));
        }
        if (d.q1 > 0.0) != q1_on {
            out.push(format!("Q1 = {} but positivity condition is {q1_on}", d.q1));
        }
    }
    out.sort();
    out.dedup();
    out
}
