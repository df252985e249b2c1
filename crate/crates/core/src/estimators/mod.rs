//! Standard and multilevel Monte Carlo estimators, level statistics, rate
//! fitting and the complexity bound.

mod multilevel;
mod rates;
mod sampling;
mod standard;
mod stats;

pub use multilevel::{bias_remainder, fixed_finest_level, mlmc, MlmcConfig, MlmcMode, ALPHA_FLOOR};
pub use rates::{complexity_bound, fit_rates, ComplexityBound, RateEstimates, Regime, BALANCE_BAND};
pub use sampling::{level_estimator, LevelSampler, CHUNK_SIZE};
pub use standard::{standard_mc, standard_mc_level, StandardMcConfig, STANDARD_MC_STREAM};
pub use stats::{Estimate, LevelStats, Z_95};
