//! Ergodic secrecy rates for the two-user fading multiple-access wiretap
//! channel.
//!
//! Two transmitters talk to one receiver while a passive eavesdropper
//! listens. The crate evaluates the secrecy-rate integrands of four
//! transmission schemes (Gaussian signalling with cooperative jamming,
//! scaling-based alignment, ergodic secret alignment, and ergodic secret
//! alignment with jamming), estimates their ergodic averages by Monte Carlo,
//! computes KKT power control for the alignment schemes, and runs
//! high-SNR scaling experiments.
//!
//! Rates are in bits per channel use. Monte Carlo runs are cut into fixed
//! batches with one random stream each, so results do not depend on the
//! number of worker threads; the `parallel` feature (on by default) fans the
//! batches out over rayon.

pub mod dof;
pub mod error;
pub mod experiment;
pub mod fading;
pub mod montecarlo;
pub mod pairing;
pub mod policy;
pub mod power;
pub mod rates;
pub mod sampling;

pub use error::{Error, Result};
pub use fading::{
    esa_partner, sample_state, sba_expand, simulate_repetition, ChannelState, FadingParams,
    SbaBlock,
};
pub use montecarlo::{
    ergodic_region, ergodic_region_with, MonteCarloEstimate, Policy, Realization, Scheme,
};
pub use rates::{
    rates_esa, rates_esa_cj, rates_esa_general, rates_gs_cj, rates_sba, PowerBudget, PowerDecision,
    RateTriple,
};
pub use sampling::{derive_seed, stream_rng, Exec, SimRng};
