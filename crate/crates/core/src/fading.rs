//! Channel-state sampling and the two repetition constructions.
//!
//! A [`ChannelState`] holds the four complex gains of one fading realization:
//! `h1`, `h2` towards the legitimate receiver and `g1`, `g2` towards the
//! eavesdropper. Every gain is circularly symmetric complex Gaussian with
//! independent real and imaginary parts of variance `var / 2`, so its squared
//! magnitude is exponential with mean `var`.

use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::sampling::{map_batches, Exec, SimRng};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelState {
    pub h1: Complex64,
    pub h2: Complex64,
    pub g1: Complex64,
    pub g2: Complex64,
}

/// Squared magnitudes `|h1|², |h2|², |g1|², |g2|²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerGains {
    pub h1: f64,
    pub h2: f64,
    pub g1: f64,
    pub g2: f64,
}

impl ChannelState {
    pub fn new(h1: Complex64, h2: Complex64, g1: Complex64, g2: Complex64) -> Self {
        Self { h1, h2, g1, g2 }
    }

    pub fn real(h1: f64, h2: f64, g1: f64, g2: f64) -> Self {
        let c = |x: f64| Complex64::new(x, 0.0);
        Self::new(c(h1), c(h2), c(g1), c(g2))
    }

    /// A real-valued state with the given squared magnitudes.
    pub fn from_power_gains(gains: PowerGains) -> Self {
        Self::real(
            gains.h1.sqrt(),
            gains.h2.sqrt(),
            gains.g1.sqrt(),
            gains.g2.sqrt(),
        )
    }

    pub fn power_gains(&self) -> PowerGains {
        PowerGains {
            h1: self.h1.norm_sqr(),
            h2: self.h2.norm_sqr(),
            g1: self.g1.norm_sqr(),
            g2: self.g2.norm_sqr(),
        }
    }

    pub fn gains(&self) -> [Complex64; 4] {
        [self.h1, self.h2, self.g1, self.g2]
    }
}

impl fmt::Display for ChannelState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "h1={}, h2={}, g1={}, g2={}",
            self.h1, self.h2, self.g1, self.g2
        )
    }
}

/// Variances of the four complex gains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingParams {
    var_h1: f64,
    var_h2: f64,
    var_g1: f64,
    var_g2: f64,
}

impl FadingParams {
    pub fn new(var_h1: f64, var_h2: f64, var_g1: f64, var_g2: f64) -> Result<Self> {
        for (name, v) in [
            ("var_h1", var_h1),
            ("var_h2", var_h2),
            ("var_g1", var_g1),
            ("var_g2", var_g2),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParams(format!(
                    "{name} must be finite and > 0, got {v}"
                )));
            }
        }
        Ok(Self {
            var_h1,
            var_h2,
            var_g1,
            var_g2,
        })
    }

    /// Both main gains with variance `var_h`, both eavesdropper gains with `var_g`.
    pub fn symmetric(var_h: f64, var_g: f64) -> Result<Self> {
        Self::new(var_h, var_h, var_g, var_g)
    }

    pub fn var_h1(&self) -> f64 {
        self.var_h1
    }
    pub fn var_h2(&self) -> f64 {
        self.var_h2
    }
    pub fn var_g1(&self) -> f64 {
        self.var_g1
    }
    pub fn var_g2(&self) -> f64 {
        self.var_g2
    }

    pub fn variances(&self) -> [f64; 4] {
        [self.var_h1, self.var_h2, self.var_g1, self.var_g2]
    }
}

fn complex_gaussian(var: f64, rng: &mut SimRng) -> Complex64 {
    let sd = (0.5 * var).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(sd * re, sd * im)
}

/// Draws one fading realization. Gains are drawn in the order h1, h2, g1, g2.
pub fn sample_state(params: &FadingParams, rng: &mut SimRng) -> ChannelState {
    let h1 = complex_gaussian(params.var_h1, rng);
    let h2 = complex_gaussian(params.var_h2, rng);
    let g1 = complex_gaussian(params.var_g1, rng);
    let g2 = complex_gaussian(params.var_g2, rng);
    ChannelState { h1, h2, g1, g2 }
}

/// `n` independent states, reproducible for a given seed and independent of
/// the execution strategy.
pub fn sample_states(params: &FadingParams, n: usize, seed: u64, exec: Exec) -> Vec<ChannelState> {
    map_batches(n, seed, exec, |range, rng| {
        range.map(|_| sample_state(params, rng)).collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect()
}

/// Two consecutive slots of the scaling-based alignment scheme.
///
/// User 1 scales its symbol by `g2` and user 2 by `g1` in every slot, so the
/// main receiver sees `a1 X1 + a2 X2` (odd) and `b1 X1 + b2 X2` (even) while
/// the eavesdropper sees `c (X1 + X2)` and `d (X1 + X2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SbaBlock {
    pub odd: ChannelState,
    pub even: ChannelState,
}

impl SbaBlock {
    pub fn a1(&self) -> Complex64 {
        self.odd.h1 * self.odd.g2
    }
    pub fn a2(&self) -> Complex64 {
        self.odd.h2 * self.odd.g1
    }
    pub fn b1(&self) -> Complex64 {
        self.even.h1 * self.even.g2
    }
    pub fn b2(&self) -> Complex64 {
        self.even.h2 * self.even.g1
    }
    pub fn c(&self) -> Complex64 {
        self.odd.g1 * self.odd.g2
    }
    pub fn d(&self) -> Complex64 {
        self.even.g1 * self.even.g2
    }

    /// `h1e h2o g1o g2e − h1o h2e g1e g2o`, the determinant of the scaled main
    /// channel matrix.
    pub fn det(&self) -> Complex64 {
        let (o, e) = (&self.odd, &self.even);
        e.h1 * o.h2 * o.g1 * e.g2 - o.h1 * e.h2 * e.g1 * o.g2
    }

    /// Scaled main-channel matrix, rows = slots, columns = users.
    pub fn main_matrix(&self) -> [[Complex64; 2]; 2] {
        [[self.a1(), self.a2()], [self.b1(), self.b2()]]
    }

    /// Eavesdropper matrix `[[c, c], [d, d]]`; its columns are identical.
    pub fn eve_matrix(&self) -> [[Complex64; 2]; 2] {
        let (c, d) = (self.c(), self.d());
        [[c, c], [d, d]]
    }
}

pub fn sba_expand(odd: ChannelState, even: ChannelState) -> SbaBlock {
    SbaBlock { odd, even }
}

/// The repetition partner used by ergodic secret alignment: `(h1, −h2, g1, g2)`.
pub fn esa_partner(state: &ChannelState) -> ChannelState {
    ChannelState {
        h2: -state.h2,
        ..*state
    }
}

/// Sum/difference outputs of one ESA repetition pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RepetitionOutputs {
    /// `Y1 + Y2`
    pub y_sum: Complex64,
    /// `Y1 − Y2`
    pub y_diff: Complex64,
    /// `Z1 + Z2`
    pub z_sum: Complex64,
    /// `Z1 − Z2`
    pub z_diff: Complex64,
}

/// Sends `(x1, x2)` at `state` and again at its ESA partner.
///
/// `noise` is `[N1, N2, N1', N2']`: main-receiver noise in the two instants,
/// then eavesdropper noise.
pub fn simulate_repetition(
    state: &ChannelState,
    x1: Complex64,
    x2: Complex64,
    noise: [Complex64; 4],
) -> RepetitionOutputs {
    let partner = esa_partner(state);
    let y1 = state.h1 * x1 + state.h2 * x2 + noise[0];
    let y2 = partner.h1 * x1 + partner.h2 * x2 + noise[1];
    let z1 = state.g1 * x1 + state.g2 * x2 + noise[2];
    let z2 = partner.g1 * x1 + partner.g2 * x2 + noise[3];
    RepetitionOutputs {
        y_sum: y1 + y2,
        y_diff: y1 - y2,
        z_sum: z1 + z2,
        z_diff: z1 - z2,
    }
}
