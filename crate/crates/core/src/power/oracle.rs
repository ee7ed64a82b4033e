//! Exhaustive grid search over the per-state Lagrangian, used to check the
//! case trees.

use crate::error::{Error, Result};
use crate::power::cj::esa_cj_lagrangian;
use crate::power::{DualVars, EffectiveState};
use crate::rates::PowerDecision;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridScheme {
    /// `grid_n²` points over `(P1, P2)`.
    Esa,
    /// Each user picks one of `{0} ∪ transmit levels ∪ jam levels`, i.e.
    /// `(2·grid_n − 1)²` pure decisions.
    EsaCj,
    /// The full `grid_n⁴` grid over `(P1, P2, Q1, Q2)`, splitting allowed.
    EsaCjSplit,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleResult {
    pub decision: PowerDecision,
    /// Lagrangian at `decision`, nats.
    pub value: f64,
}

fn levels(grid_max: f64, grid_n: usize) -> Vec<f64> {
    let step = grid_max / (grid_n - 1) as f64;
    (0..grid_n).map(|i| i as f64 * step).collect()
}

/// Argmax of the per-state Lagrangian on a uniform grid over `[0, grid_max]`.
pub fn grid_oracle(
    s: &EffectiveState,
    duals: &DualVars,
    scheme: GridScheme,
    grid_max: f64,
    grid_n: usize,
) -> Result<OracleResult> {
    if grid_n < 2 || !(grid_max > 0.0 && grid_max.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "grid needs grid_n >= 2 and grid_max > 0, got {grid_n} and {grid_max}"
        )));
    }
    let xs = levels(grid_max, grid_n);
    Ok(match scheme {
        GridScheme::Esa => esa_grid(s, duals, &xs),
        GridScheme::EsaCj => cj_grid(s, duals, &xs),
        GridScheme::EsaCjSplit => split_grid(s, duals, &xs),
    })
}

fn esa_grid(s: &EffectiveState, duals: &DualVars, xs: &[f64]) -> OracleResult {
    // L = u(P1) + v(P2) − ln(1 + g1·P1 + g2·P2); the coupling term is at most
    // −ln(1 + g1·P1), which lets whole rows be skipped.
    let u: Vec<f64> = xs
        .iter()
        .map(|&x| (s.h1 * x).ln_1p() - duals.lambda1 * x)
        .collect();
    let v: Vec<f64> = xs
        .iter()
        .map(|&y| (s.h2 * y).ln_1p() - duals.lambda2 * y)
        .collect();
    let v_max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut best = (f64::NEG_INFINITY, 0, 0);
    for (i, &x) in xs.iter().enumerate() {
        let row_eve = 1.0 + s.g1 * x;
        if u[i] - row_eve.ln() + v_max < best.0 {
            continue;
        }
        for (j, &y) in xs.iter().enumerate() {
            let value = u[i] + v[j] - (row_eve + s.g2 * y).ln();
            if value > best.0 {
                best = (value, i, j);
            }
        }
    }
    OracleResult {
        decision: PowerDecision::transmit(xs[best.1], xs[best.2]),
        value: best.0,
    }
}

/// One user's pure options: `(transmit, jam)`.
fn pure_options(xs: &[f64]) -> Vec<(f64, f64)> {
    let mut opts = vec![(0.0, 0.0)];
    opts.extend(xs[1..].iter().map(|&x| (x, 0.0)));
    opts.extend(xs[1..].iter().map(|&x| (0.0, x)));
    opts
}

fn cj_grid(s: &EffectiveState, duals: &DualVars, xs: &[f64]) -> OracleResult {
    let opts = pure_options(xs);
    // Separable part per user: ln(1+h·T) − ln(1+h·Q) − λ·T.
    let sep = |h: f64, lambda: f64| -> Vec<f64> {
        opts.iter()
            .map(|&(p, q)| (h * (p + q)).ln_1p() - (h * q).ln_1p() - lambda * (p + q))
            .collect()
    };
    let u = sep(s.h1, duals.lambda1);
    let v = sep(s.h2, duals.lambda2);
    let mut best = (f64::NEG_INFINITY, 0, 0);
    for (i, &(p1, q1)) in opts.iter().enumerate() {
        let t1 = p1 + q1;
        for (j, &(p2, q2)) in opts.iter().enumerate() {
            let t2 = p2 + q2;
            let coupled = ((1.0 + s.g1 * q1 + s.g2 * q2) / (1.0 + s.g1 * t1 + s.g2 * t2)).ln();
            let value = u[i] + v[j] + coupled;
            if value > best.0 {
                best = (value, i, j);
            }
        }
    }
    let ((p1, q1), (p2, q2)) = (opts[best.1], opts[best.2]);
    OracleResult {
        decision: PowerDecision::new(p1, p2, q1, q2),
        value: best.0,
    }
}

fn split_grid(s: &EffectiveState, duals: &DualVars, xs: &[f64]) -> OracleResult {
    let mut best = OracleResult {
        decision: PowerDecision::ZERO,
        value: f64::NEG_INFINITY,
    };
    for &p1 in xs {
        for &p2 in xs {
            for &q1 in xs {
                for &q2 in xs {
                    let d = PowerDecision::new(p1, p2, q1, q2);
                    let value = esa_cj_lagrangian(s, &d, duals);
                    if value > best.value {
                        best = OracleResult { decision: d, value };
                    }
                }
            }
        }
    }
    best
}
