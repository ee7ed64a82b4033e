//! KKT power control for the alignment schemes.
//!
//! Everything here works on effective gains: `h_k = 2|h_k|²`, `g_k = 2|g_k|²`
//! for ESA and ESA/CJ. Per-state objectives are in nats and the per-state
//! Lagrangian is `objective − λ1·(P1 + Q1) − λ2·(P2 + Q2)`.

pub mod baseline;
pub mod cj;
pub mod dual;
pub mod esa;
pub mod oracle;
mod roots;
pub mod verify;

use crate::error::{Error, Result};
use crate::fading::ChannelState;

pub use baseline::{gs_cj_baseline_policy, GsCjBaselinePolicy};
pub use cj::{
    esa_cj_case_policy, esa_cj_kkt_points, esa_cj_kkt_residual, esa_cj_lagrangian, solve_p1q2,
    solve_p2q1, CjBranch, CjDecision, EsaCjKktPolicy,
};
pub use dual::{dual_search, dual_search_with, DualScheme, DualSearchConfig, DualSearchResult};
pub use esa::{
    closed_form_p1, closed_form_p2, esa_case_policy, esa_kkt_points, esa_kkt_residual,
    esa_lagrangian, solve_common_root, EsaCase, EsaDecision, EsaKktPolicy,
};
pub use oracle::{grid_oracle, GridScheme, OracleResult};

/// Effective power gains of one state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveState {
    pub h1: f64,
    pub h2: f64,
    pub g1: f64,
    pub g2: f64,
}

impl EffectiveState {
    pub fn new(h1: f64, h2: f64, g1: f64, g2: f64) -> Result<Self> {
        let s = Self { h1, h2, g1, g2 };
        if s.as_array().iter().all(|v| v.is_finite() && *v >= 0.0) {
            Ok(s)
        } else {
            Err(Error::InvalidArgument(format!(
                "effective gains must be finite and >= 0, got {s:?}"
            )))
        }
    }

    /// `2|·|²` of every gain.
    pub fn from_channel(state: &ChannelState) -> Self {
        let g = state.power_gains();
        Self {
            h1: 2.0 * g.h1,
            h2: 2.0 * g.h2,
            g1: 2.0 * g.g1,
            g2: 2.0 * g.g2,
        }
    }

    /// A real channel state with these effective gains.
    pub fn to_channel(&self) -> ChannelState {
        ChannelState::real(
            (0.5 * self.h1).sqrt(),
            (0.5 * self.h2).sqrt(),
            (0.5 * self.g1).sqrt(),
            (0.5 * self.g2).sqrt(),
        )
    }

    /// Exchanges the roles of the two users.
    pub fn swapped(&self) -> Self {
        Self {
            h1: self.h2,
            h2: self.h1,
            g1: self.g2,
            g2: self.g1,
        }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.h1, self.h2, self.g1, self.g2]
    }
}

/// Multipliers of the two average-power constraints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualVars {
    pub lambda1: f64,
    pub lambda2: f64,
}

impl DualVars {
    pub fn new(lambda1: f64, lambda2: f64) -> Result<Self> {
        if lambda1 > 0.0 && lambda2 > 0.0 && lambda1.is_finite() && lambda2.is_finite() {
            Ok(Self { lambda1, lambda2 })
        } else {
            Err(Error::InvalidArgument(format!(
                "multipliers must be finite and > 0, got ({lambda1}, {lambda2})"
            )))
        }
    }

    pub fn swapped(&self) -> Self {
        Self {
            lambda1: self.lambda2,
            lambda2: self.lambda1,
        }
    }

    pub fn min(&self) -> f64 {
        self.lambda1.min(self.lambda2)
    }
}
