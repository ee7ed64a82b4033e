//! Positive common roots of the two-equation systems behind the KKT
//! conditions.
//!
//! After clearing denominators both systems have the shape
//!
//! ```text
//! F1(x, y) = A(x) + B(x)·y                 A quadratic, B linear
//! F2(x, y) = C0(x) + C1(x)·y + c2·y²       C0, C1 linear
//! ```
//!
//! Substituting `y = −A/B` into `F2` and multiplying by `B²` leaves the
//! univariate polynomial `R(x) = C0·B² − C1·A·B + c2·A²`. Its real roots are
//! isolated by recursive derivative splitting plus bisection, back-substituted,
//! and polished with Newton steps on `(F1, F2)`. A damped two-dimensional
//! Newton multistart is the fallback when elimination yields only roots that
//! fail verification.

use crate::error::{Error, Result};

/// Scaled residual below which a polished root is accepted.
pub(crate) const ACCEPT_TOL: f64 = 1e-9;
/// Residual below which a rejected candidate still counts as evidence of a
/// real root that the numerics failed to pin down.
const NEAR_MISS_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy)]
pub(crate) struct PolySystem {
    pub a: [f64; 3],
    pub b: [f64; 2],
    pub c0: [f64; 2],
    pub c1: [f64; 2],
    pub c2: f64,
}

impl PolySystem {
    pub fn eval(&self, x: f64, y: f64) -> (f64, f64) {
        let a = self.a[0] + x * (self.a[1] + x * self.a[2]);
        let b = self.b[0] + x * self.b[1];
        let c0 = self.c0[0] + x * self.c0[1];
        let c1 = self.c1[0] + x * self.c1[1];
        (a + b * y, c0 + y * (c1 + self.c2 * y))
    }

    fn jacobian(&self, x: f64, y: f64) -> [[f64; 2]; 2] {
        let da = self.a[1] + 2.0 * self.a[2] * x;
        let b = self.b[0] + x * self.b[1];
        let c1 = self.c1[0] + x * self.c1[1];
        [
            [da + self.b[1] * y, b],
            [self.c0[1] + self.c1[1] * y, c1 + 2.0 * self.c2 * y],
        ]
    }

    /// Coefficients of `R(x)` (ascending), each with the magnitude of the
    /// products that formed it so cancellation noise can be recognized.
    fn resultant(&self) -> Tracked {
        let a = Tracked::exact(&self.a);
        let b = Tracked::exact(&self.b);
        let c0 = Tracked::exact(&self.c0);
        let c1 = Tracked::exact(&self.c1);
        let first = c0.mul(&b).mul(&b);
        let second = c1.mul(&a).mul(&b).scale(-1.0);
        let third = a.mul(&a).scale(self.c2);
        first.add(&second).add(&third)
    }

    /// Real roots `y` of `F2(x, ·) = 0`.
    fn y_roots_at(&self, x: f64) -> Vec<f64> {
        let c0 = self.c0[0] + x * self.c0[1];
        let c1 = self.c1[0] + x * self.c1[1];
        quadratic_roots(self.c2, c1, c0)
    }
}

/// Polynomial with per-coefficient magnitude bounds.
#[derive(Debug, Clone)]
struct Tracked {
    value: Vec<f64>,
    mag: Vec<f64>,
}

impl Tracked {
    fn exact(c: &[f64]) -> Self {
        Self {
            value: c.to_vec(),
            mag: c.iter().map(|v| v.abs()).collect(),
        }
    }

    fn mul(&self, o: &Tracked) -> Tracked {
        let n = self.value.len() + o.value.len() - 1;
        let mut value = vec![0.0; n];
        let mut mag = vec![0.0; n];
        for i in 0..self.value.len() {
            for j in 0..o.value.len() {
                value[i + j] += self.value[i] * o.value[j];
                mag[i + j] += self.mag[i] * o.mag[j];
            }
        }
        Tracked { value, mag }
    }

    fn add(&self, o: &Tracked) -> Tracked {
        let n = self.value.len().max(o.value.len());
        let get = |v: &Vec<f64>, i: usize| v.get(i).copied().unwrap_or(0.0);
        Tracked {
            value: (0..n)
                .map(|i| get(&self.value, i) + get(&o.value, i))
                .collect(),
            mag: (0..n).map(|i| get(&self.mag, i) + get(&o.mag, i)).collect(),
        }
    }

    fn scale(&self, k: f64) -> Tracked {
        Tracked {
            value: self.value.iter().map(|v| v * k).collect(),
            mag: self.mag.iter().map(|v| v * k.abs()).collect(),
        }
    }

    /// Drops leading coefficients that are indistinguishable from rounding
    /// noise and returns the plain polynomial.
    fn into_trimmed(self) -> Vec<f64> {
        let mut value = self.value;
        while let Some(&last) = value.last() {
            let k = value.len() - 1;
            if last == 0.0 || last.abs() <= 64.0 * f64::EPSILON * self.mag[k] {
                value.pop();
            } else {
                break;
            }
        }
        value
    }
}

fn eval_poly(p: &[f64], x: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

fn eval_mag(p: &[f64], x: f64) -> f64 {
    let ax = x.abs();
    p.iter().rev().fold(0.0, |acc, c| acc * ax + c.abs())
}

fn derivative(p: &[f64]) -> Vec<f64> {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| i as f64 * c)
        .collect()
}

/// Roots of `a·t² + b·t + c`, avoiding cancellation.
pub(crate) fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    if a == 0.0 {
        if b == 0.0 {
            return Vec::new();
        }
        return vec![-c / b];
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Vec::new();
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    if q == 0.0 {
        return vec![0.0];
    }
    let mut roots = vec![q / a, c / q];
    roots.sort_by(f64::total_cmp);
    roots
}

fn bisect(p: &[f64], mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = eval_poly(p, lo);
    for _ in 0..300 {
        let mid = if lo > 0.0 && hi > 4.0 * lo {
            (lo * hi).sqrt()
        } else {
            0.5 * (lo + hi)
        };
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = eval_poly(p, mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Real roots of `p` in `[lo, hi]`, ascending. Points where `p` touches zero
/// without changing sign are reported when `|p|` is within rounding of zero.
fn real_roots_in(p: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    match p.len() {
        0 | 1 => Vec::new(),
        2 => {
            let r = -p[0] / p[1];
            if (lo..=hi).contains(&r) {
                vec![r]
            } else {
                Vec::new()
            }
        }
        _ => {
            let mut knots = vec![lo];
            knots.extend(real_roots_in(&derivative(p), lo, hi));
            knots.push(hi);
            let mut roots = Vec::new();
            for w in knots.windows(2) {
                let (u, v) = (w[0], w[1]);
                let (fu, fv) = (eval_poly(p, u), eval_poly(p, v));
                if fu.abs() <= 1e-12 * eval_mag(p, u) {
                    roots.push(u);
                } else if (fu < 0.0) != (fv < 0.0) && fv != 0.0 {
                    roots.push(bisect(p, u, v));
                }
            }
            if eval_poly(p, hi) == 0.0 {
                roots.push(hi);
            }
            roots.sort_by(f64::total_cmp);
            roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * a.abs().max(b.abs()));
            roots
        }
    }
}

/// Cauchy bound on the magnitude of the roots of `p`.
fn root_bound(p: &[f64]) -> f64 {
    let lead = p[p.len() - 1].abs();
    1.0 + p[..p.len() - 1]
        .iter()
        .map(|c| c.abs() / lead)
        .fold(0.0, f64::max)
}

/// Newton iterations on `(F1, F2)` from `(x, y)`; returns the point with the
/// smallest residual norm seen.
fn polish(sys: &PolySystem, mut x: f64, mut y: f64) -> (f64, f64) {
    let norm = |x: f64, y: f64| {
        let (f1, f2) = sys.eval(x, y);
        f1.hypot(f2)
    };
    let mut best = (x, y, norm(x, y));
    for _ in 0..30 {
        let (f1, f2) = sys.eval(x, y);
        let j = sys.jacobian(x, y);
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det == 0.0 || !det.is_finite() {
            break;
        }
        let dx = (f1 * j[1][1] - f2 * j[0][1]) / det;
        let dy = (f2 * j[0][0] - f1 * j[1][0]) / det;
        x -= dx;
        y -= dy;
        let r = norm(x, y);
        if !r.is_finite() {
            break;
        }
        if r < best.2 {
            best = (x, y, r);
        }
        if dx.abs() <= 1e-16 * x.abs() && dy.abs() <= 1e-16 * y.abs() {
            break;
        }
    }
    (best.0, best.1)
}

/// Damped Newton from one start; keeps iterates strictly positive.
fn damped_newton(sys: &PolySystem, mut x: f64, mut y: f64) -> Option<(f64, f64)> {
    let merit = |x: f64, y: f64| {
        let (f1, f2) = sys.eval(x, y);
        f1 * f1 + f2 * f2
    };
    let mut m = merit(x, y);
    for _ in 0..200 {
        let (f1, f2) = sys.eval(x, y);
        let j = sys.jacobian(x, y);
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let dx = -(f1 * j[1][1] - f2 * j[0][1]) / det;
        let dy = -(f2 * j[0][0] - f1 * j[1][0]) / det;
        let mut t: f64 = 1.0;
        // Stay inside the positive quadrant.
        if x + dx <= 0.0 {
            t = t.min(0.9 * x / -dx);
        }
        if y + dy <= 0.0 {
            t = t.min(0.9 * y / -dy);
        }
        let mut accepted = false;
        for _ in 0..40 {
            let (nx, ny) = (x + t * dx, y + t * dy);
            let nm = merit(nx, ny);
            if nm.is_finite() && nm < m {
                x = nx;
                y = ny;
                m = nm;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
        if (t * dx).abs() <= 1e-15 * x && (t * dy).abs() <= 1e-15 * y {
            break;
        }
    }
    Some((x, y))
}

fn clamp_tiny_negative(v: f64) -> f64 {
    if v < 0.0 && v > -1e-9 {
        0.0
    } else {
        v
    }
}

fn push_unique(roots: &mut Vec<(f64, f64)>, r: (f64, f64)) {
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-7 * a.abs().max(b.abs()).max(1e-12);
    if !roots.iter().any(|q| close(q.0, r.0) && close(q.1, r.1)) {
        roots.push(r);
    }
}

/// All verified roots with `x > 0`, `y > 0`.
///
/// `residual(x, y)` returns the scaled residual of the original (rational)
/// equations; roots are accepted when it is at most [`ACCEPT_TOL`].
/// `x_scale` sets the span of the Newton multistart grid.
pub(crate) fn positive_roots(
    sys: &PolySystem,
    residual: &dyn Fn(f64, f64) -> f64,
    x_scale: f64,
    context: &dyn Fn() -> String,
) -> Result<Vec<(f64, f64)>> {
    let mut candidates: Vec<(f64, f64)> = Vec::new();
    if sys.b == [0.0, 0.0] {
        // F1 does not involve y: x comes from A alone.
        for x in quadratic_roots(sys.a[2], sys.a[1], sys.a[0]) {
            for y in sys.y_roots_at(x) {
                candidates.push((x, y));
            }
        }
    } else {
        let r = sys.resultant().into_trimmed();
        if r.len() >= 2 {
            let hi = root_bound(&r);
            for x in real_roots_in(&r, 0.0, hi) {
                let b = sys.b[0] + x * sys.b[1];
                if b.abs() <= 1e-9 * (sys.b[0].abs() + (x * sys.b[1]).abs()) {
                    for y in sys.y_roots_at(x) {
                        candidates.push((x, y));
                    }
                } else {
                    let a = sys.a[0] + x * (sys.a[1] + x * sys.a[2]);
                    candidates.push((x, -a / b));
                }
            }
        }
    }

    let mut accepted = Vec::new();
    let mut near_miss = false;
    for (x0, y0) in candidates {
        if !(x0 >= -1e-9 && y0 >= -1e-9) || !x0.is_finite() || !y0.is_finite() {
            continue;
        }
        let (x, y) = polish(sys, x0.max(0.0), y0.max(0.0));
        let (x, y) = (clamp_tiny_negative(x), clamp_tiny_negative(y));
        if !(x > 0.0 && y > 0.0) {
            continue;
        }
        let res = residual(x, y);
        if res <= ACCEPT_TOL {
            push_unique(&mut accepted, (x, y));
        } else if res <= NEAR_MISS_TOL {
            near_miss = true;
        }
    }
    if !accepted.is_empty() || !near_miss {
        return Ok(accepted);
    }

    log::debug!(
        "elimination left only near-miss roots, trying Newton multistart: {}",
        context()
    );
    let fractions = [0.02, 0.1, 0.3, 0.6, 1.0];
    for fx in fractions {
        for fy in fractions {
            if let Some((x, y)) = damped_newton(sys, fx * x_scale, fy * x_scale) {
                if x > 0.0 && y > 0.0 && residual(x, y) <= ACCEPT_TOL {
                    push_unique(&mut accepted, (x, y));
                }
            }
        }
    }
    if accepted.is_empty() {
        Err(Error::NonConvergence { context: context() })
    } else {
        Ok(accepted)
    }
}
