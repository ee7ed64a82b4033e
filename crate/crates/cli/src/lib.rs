//! Experiment runner behind the `secalign` binary: figure data, high-SNR
//! scaling runs and single-state queries.

pub mod config;
pub mod figures;
pub mod query;
pub mod scaling;
pub mod table;
