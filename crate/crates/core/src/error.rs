use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid fading parameters: {0}")]
    InvalidParams(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("policy returned negative power {value} for {field}")]
    NegativePower { field: &'static str, value: f64 },

    #[error("closed-form root requires h > g (h = {h}, g = {g})")]
    InvalidCase { h: f64, g: f64 },

    #[error("root finder did not converge ({context})")]
    NonConvergence { context: String },

    #[error("case {case} requires a positive common root but none was found (state {state})")]
    MissingRoot { case: String, state: String },

    #[error("dual search did not stabilize after {sweeps} sweeps (realized {realized:?}, budget {budget:?})")]
    DualSearchFailed {
        sweeps: usize,
        realized: [f64; 2],
        budget: [f64; 2],
    },
}

pub type Result<T> = std::result::Result<T, Error>;
