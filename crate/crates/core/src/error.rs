use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("path length {len} is not divisible by refinement factor {factor}")]
    NotDivisible { len: usize, factor: u32 },

    #[error("increments span {span} but the model horizon is {horizon}")]
    HorizonMismatch { span: f64, horizon: f64 },

    #[error("Milstein scheme requires the diffusion derivative, which the model does not supply")]
    MilsteinUnavailable,

    #[error("non-finite state after step {step}")]
    NonFinite { step: usize },

    #[error("non-finite state at level {level}, path {path}, step {step}")]
    PathOverflow { level: u32, path: u64, step: usize },

    #[error("payoff evaluated at non-finite terminal value")]
    NonFiniteTerminal,

    #[error("level statistics for different levels cannot be merged ({left} vs {right})")]
    LevelMismatch { left: u32, right: u32 },

    #[error("bias target not met after reaching the maximum level {l_max}")]
    NoConvergence { l_max: u32 },

    #[error("rate fit needs at least 3 usable levels for {rate}, found {usable}")]
    TooFewLevels { rate: &'static str, usable: usize },

    #[error("complexity theorem requires alpha >= min(beta, gamma)/2, got alpha={alpha}, beta={beta}, gamma={gamma}")]
    HypothesisViolated { alpha: f64, beta: f64, gamma: f64 },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}
