//! Instantaneous secrecy-rate integrands, in bits per channel use.
//!
//! Each function returns the bracketed terms of the per-user and sum-rate
//! bounds at a single fading state, before any expectation. The alignment
//! schemes spread one codeword over two channel uses and carry the ½ factor;
//! Gaussian signalling with cooperative jamming does not.

use std::f64::consts::LN_2;
use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};
use crate::fading::{ChannelState, SbaBlock};

/// Per-state transmit powers `p1, p2` and jamming powers `q1, q2`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PowerDecision {
    pub p1: f64,
    pub p2: f64,
    pub q1: f64,
    pub q2: f64,
}

impl PowerDecision {
    pub const ZERO: PowerDecision = PowerDecision {
        p1: 0.0,
        p2: 0.0,
        q1: 0.0,
        q2: 0.0,
    };

    pub fn transmit(p1: f64, p2: f64) -> Self {
        Self {
            p1,
            p2,
            q1: 0.0,
            q2: 0.0,
        }
    }

    pub fn new(p1: f64, p2: f64, q1: f64, q2: f64) -> Self {
        Self { p1, p2, q1, q2 }
    }

    /// Total power spent by each user, `[p1 + q1, p2 + q2]`.
    pub fn user_power(&self) -> [f64; 2] {
        [self.p1 + self.q1, self.p2 + self.q2]
    }

    /// Fails on the first negative or NaN component.
    pub fn validate(&self) -> Result<()> {
        for (field, value) in [
            ("p1", self.p1),
            ("p2", self.p2),
            ("q1", self.q1),
            ("q2", self.q2),
        ] {
            if !(value >= 0.0) {
                return Err(Error::NegativePower { field, value });
            }
        }
        Ok(())
    }
}

/// Bounds on `R1`, `R2` and `R1 + R2`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RateTriple {
    pub r1: f64,
    pub r2: f64,
    pub rsum: f64,
}

impl RateTriple {
    pub fn new(r1: f64, r2: f64, rsum: f64) -> Self {
        Self { r1, r2, rsum }
    }

    pub fn map(self, f: impl Fn(f64) -> f64) -> Self {
        Self::new(f(self.r1), f(self.r2), f(self.rsum))
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.r1, self.r2, self.rsum]
    }
}

impl Add for RateTriple {
    type Output = RateTriple;
    fn add(self, o: RateTriple) -> RateTriple {
        RateTriple::new(self.r1 + o.r1, self.r2 + o.r2, self.rsum + o.rsum)
    }
}

impl Sub for RateTriple {
    type Output = RateTriple;
    fn sub(self, o: RateTriple) -> RateTriple {
        RateTriple::new(self.r1 - o.r1, self.r2 - o.r2, self.rsum - o.rsum)
    }
}

impl Mul<f64> for RateTriple {
    type Output = RateTriple;
    fn mul(self, k: f64) -> RateTriple {
        self.map(|x| x * k)
    }
}

/// Average power constraints of the two users.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerBudget {
    pbar1: f64,
    pbar2: f64,
}

impl PowerBudget {
    pub fn new(pbar1: f64, pbar2: f64) -> Result<Self> {
        if !(pbar1 >= 0.0 && pbar2 >= 0.0 && pbar1.is_finite() && pbar2.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "power budgets must be finite and >= 0, got ({pbar1}, {pbar2})"
            )));
        }
        Ok(Self { pbar1, pbar2 })
    }

    pub fn symmetric(pbar: f64) -> Result<Self> {
        Self::new(pbar, pbar)
    }

    /// Budget whose average SNR `½(P̄1 + P̄2)` equals `snr_db` with both users equal.
    pub fn from_snr_db(snr_db: f64) -> Result<Self> {
        Self::symmetric(10f64.powf(snr_db / 10.0))
    }

    pub fn pbar1(&self) -> f64 {
        self.pbar1
    }
    pub fn pbar2(&self) -> f64 {
        self.pbar2
    }
    pub fn as_array(&self) -> [f64; 2] {
        [self.pbar1, self.pbar2]
    }
}

/// `log2(1 + x)`, accurate for small `x`.
#[inline]
pub(crate) fn log2_1p(x: f64) -> f64 {
    x.ln_1p() / LN_2
}

/// Gaussian signalling with cooperative jamming. No ½ factor.
pub fn rates_gs_cj(state: &ChannelState, d: &PowerDecision) -> RateTriple {
    let g = state.power_gains();
    let (a1, a2, b1, b2) = (g.h1, g.h2, g.g1, g.g2);
    let main_noise = 1.0 + a1 * d.q1 + a2 * d.q2;
    let eve_noise = 1.0 + b1 * d.q1 + b2 * d.q2;
    let r1 = log2_1p(a1 * d.p1 / main_noise)
        - log2_1p(b1 * d.p1 / (1.0 + b1 * d.q1 + b2 * (d.p2 + d.q2)));
    let r2 = log2_1p(a2 * d.p2 / main_noise)
        - log2_1p(b2 * d.p2 / (1.0 + b2 * d.q2 + b1 * (d.p1 + d.q1)));
    let rsum = log2_1p((a1 * d.p1 + a2 * d.p2) / main_noise)
        - log2_1p((b1 * d.p1 + b2 * d.p2) / eve_noise);
    RateTriple::new(r1, r2, rsum)
}

/// Scaling-based alignment over one odd/even slot pair.
///
/// The eavesdropper sees `X1 + X2` through a scalar channel of energy
/// `|c|² + |d|²`, so its sum term has no cross product while the main
/// receiver keeps the `|det|²·P1·P2` term.
pub fn rates_sba(block: &SbaBlock, p1: f64, p2: f64) -> RateTriple {
    let main1 = block.a1().norm_sqr() + block.b1().norm_sqr();
    let main2 = block.a2().norm_sqr() + block.b2().norm_sqr();
    let eve = block.c().norm_sqr() + block.d().norm_sqr();
    let det = block.det().norm_sqr();
    let r1 = log2_1p(main1 * p1) - log2_1p(eve * p1 / (1.0 + eve * p2));
    let r2 = log2_1p(main2 * p2) - log2_1p(eve * p2 / (1.0 + eve * p1));
    let rsum = log2_1p(main1 * p1 + main2 * p2 + det * p1 * p2) - log2_1p(eve * (p1 + p2));
    RateTriple::new(0.5 * r1, 0.5 * r2, 0.5 * rsum)
}

/// Ergodic secret alignment with the sign-flipped repetition partner.
pub fn rates_esa(state: &ChannelState, p1: f64, p2: f64) -> RateTriple {
    let g = state.power_gains();
    let (a1, a2, b1, b2) = (g.h1, g.h2, g.g1, g.g2);
    let r1 = log2_1p(2.0 * a1 * p1) - log2_1p(2.0 * b1 * p1 / (1.0 + 2.0 * b2 * p2));
    let r2 = log2_1p(2.0 * a2 * p2) - log2_1p(2.0 * b2 * p2 / (1.0 + 2.0 * b1 * p1));
    let rsum = log2_1p(2.0 * a1 * p1) + log2_1p(2.0 * a2 * p2) - log2_1p(2.0 * (b1 * p1 + b2 * p2));
    RateTriple::new(0.5 * r1, 0.5 * r2, 0.5 * rsum)
}

/// ESA with arbitrary repetition phases: `theta` is the phase offset of the
/// partner's main channel, `omega` that of its eavesdropper channel.
pub fn rates_esa_general(
    state: &ChannelState,
    theta: f64,
    omega: f64,
    p1: f64,
    p2: f64,
) -> RateTriple {
    let g = state.power_gains();
    let (a1, a2, b1, b2) = (g.h1, g.h2, g.g1, g.g2);
    let main_cross = 2.0 * (1.0 - theta.cos()) * a1 * a2 * p1 * p2;
    let eve_cross = 2.0 * (1.0 - omega.cos()) * b1 * b2 * p1 * p2;
    let r1 = log2_1p(2.0 * a1 * p1) - log2_1p((2.0 * b1 * p1 + eve_cross) / (1.0 + 2.0 * b2 * p2));
    let r2 = log2_1p(2.0 * a2 * p2) - log2_1p((2.0 * b2 * p2 + eve_cross) / (1.0 + 2.0 * b1 * p1));
    let rsum = log2_1p(2.0 * a1 * p1 + 2.0 * a2 * p2 + main_cross)
        - log2_1p(2.0 * b1 * p1 + 2.0 * b2 * p2 + eve_cross);
    RateTriple::new(0.5 * r1, 0.5 * r2, 0.5 * rsum)
}

/// ESA combined with cooperative jamming. With `q1 = q2 = 0` this is
/// bit-for-bit [`rates_esa`].
pub fn rates_esa_cj(state: &ChannelState, d: &PowerDecision) -> RateTriple {
    let g = state.power_gains();
    let (a1, a2, b1, b2) = (g.h1, g.h2, g.g1, g.g2);
    let (p1, p2, q1, q2) = (d.p1, d.p2, d.q1, d.q2);
    let main1 = log2_1p(2.0 * a1 * p1 / (1.0 + 2.0 * a1 * q1));
    let main2 = log2_1p(2.0 * a2 * p2 / (1.0 + 2.0 * a2 * q2));
    let r1 = main1 - log2_1p(2.0 * b1 * p1 / (1.0 + 2.0 * b1 * q1 + 2.0 * b2 * (p2 + q2)));
    let r2 = main2 - log2_1p(2.0 * b2 * p2 / (1.0 + 2.0 * b2 * q2 + 2.0 * b1 * (p1 + q1)));
    let rsum =
        main1 + main2 - log2_1p(2.0 * (b1 * p1 + b2 * p2) / (1.0 + 2.0 * (b1 * q1 + b2 * q2)));
    RateTriple::new(0.5 * r1, 0.5 * r2, 0.5 * rsum)
}
