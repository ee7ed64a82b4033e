//! One point of an experiment: a scheme, a power policy and a budget,
//! evaluated by Monte Carlo.

use std::fmt;

use crate::error::{Error, Result};
use crate::fading::FadingParams;
use crate::montecarlo::{ergodic_region_with, MonteCarloEstimate, Policy, Scheme};
use crate::policy::{sba_candidate_powers, ConstantPolicy, RudimentaryEsa, RudimentarySba};
use crate::power::{
    dual_search_with, DualScheme, DualSearchConfig, DualSearchResult, EsaCjKktPolicy, EsaKktPolicy,
    GsCjBaselinePolicy,
};
use crate::rates::{PowerBudget, PowerDecision};
use crate::sampling::{derive_seed, Exec};

/// Index used to derive the frozen dual-search batch from a point seed.
const DUAL_BATCH_STREAM: u64 = 0xD0A1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolicyChoice {
    /// Full budget in every state (SBA: the budget-matching scaled powers).
    Constant,
    /// On/off at full power; SBA averages `inner` even-slot states.
    Rudimentary { inner: usize },
    /// Case-tree power control with multipliers from a dual search over a
    /// frozen batch of `dual_samples` states.
    KktDual { dual_samples: usize },
    /// The approximate GS/CJ baseline with multipliers from a dual search.
    Baseline { dual_samples: usize },
}

impl PolicyChoice {
    pub fn name(&self) -> &'static str {
        match self {
            PolicyChoice::Constant => "constant",
            PolicyChoice::Rudimentary { .. } => "rudimentary",
            PolicyChoice::KktDual { .. } => "kkt-dual",
            PolicyChoice::Baseline { .. } => "baseline",
        }
    }

    /// The policies used for the high-SNR scaling experiments: constant
    /// powers for the alignment schemes, the baseline for GS/CJ.
    pub fn for_dof(scheme: Scheme, dual_samples: usize) -> Self {
        match scheme {
            Scheme::GsCj => PolicyChoice::Baseline { dual_samples },
            _ => PolicyChoice::Constant,
        }
    }
}

impl fmt::Display for PolicyChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointSpec {
    pub scheme: Scheme,
    pub policy: PolicyChoice,
    pub params: FadingParams,
    pub budget: PowerBudget,
    /// Monte Carlo samples for the evaluation.
    pub n: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointResult {
    pub estimate: MonteCarloEstimate,
    pub dual: Option<DualSearchResult>,
}

fn unsupported(spec: &PointSpec) -> Error {
    Error::InvalidArgument(format!(
        "policy {} is not available for scheme {}",
        spec.policy, spec.scheme
    ))
}

fn dual_config(dual_samples: usize, exec: Exec) -> DualSearchConfig {
    DualSearchConfig {
        n: dual_samples,
        exec,
        ..DualSearchConfig::default()
    }
}

/// Builds the policy (running a dual search if needed) and evaluates it.
pub fn evaluate_point(spec: &PointSpec, exec: Exec) -> Result<PointResult> {
    let run = |policy: &dyn Policy| {
        ergodic_region_with(spec.scheme, policy, &spec.params, spec.n, spec.seed, exec)
    };
    let dual_seed = derive_seed(spec.seed, DUAL_BATCH_STREAM);
    match (spec.policy, spec.scheme) {
        (PolicyChoice::Constant, Scheme::Sba) => {
            let (p1, p2) = sba_candidate_powers(&spec.budget, &spec.params);
            Ok(PointResult {
                estimate: run(&ConstantPolicy(PowerDecision::transmit(p1, p2)))?,
                dual: None,
            })
        }
        (PolicyChoice::Constant, _) => {
            let d = PowerDecision::transmit(spec.budget.pbar1(), spec.budget.pbar2());
            Ok(PointResult {
                estimate: run(&ConstantPolicy(d))?,
                dual: None,
            })
        }
        (PolicyChoice::Rudimentary { .. }, Scheme::Esa) => Ok(PointResult {
            estimate: run(&RudimentaryEsa {
                budget: spec.budget,
            })?,
            dual: None,
        }),
        (PolicyChoice::Rudimentary { inner }, Scheme::Sba) => {
            let policy = RudimentarySba {
                budget: spec.budget,
                params: spec.params,
                m_inner: inner,
            };
            Ok(PointResult {
                estimate: run(&policy)?,
                dual: None,
            })
        }
        (PolicyChoice::KktDual { dual_samples }, Scheme::Esa | Scheme::EsaCj) => {
            let dual_scheme = if spec.scheme == Scheme::Esa {
                DualScheme::Esa
            } else {
                DualScheme::EsaCj
            };
            let dual = dual_search_with(
                &spec.params,
                &spec.budget,
                dual_scheme,
                &dual_config(dual_samples, exec),
                dual_seed,
            )?;
            let estimate = if spec.scheme == Scheme::Esa {
                run(&EsaKktPolicy { duals: dual.duals })?
            } else {
                run(&EsaCjKktPolicy { duals: dual.duals })?
            };
            Ok(PointResult {
                estimate,
                dual: Some(dual),
            })
        }
        (PolicyChoice::Baseline { dual_samples }, Scheme::GsCj) => {
            let config = dual_config(dual_samples, exec);
            let dual = dual_search_with(
                &spec.params,
                &spec.budget,
                DualScheme::GsCjBaseline,
                &config,
                dual_seed,
            )?;
            Ok(PointResult {
                estimate: run(&GsCjBaselinePolicy { duals: dual.duals })?,
                dual: Some(dual),
            })
        }
        _ => Err(unsupported(spec)),
    }
}
