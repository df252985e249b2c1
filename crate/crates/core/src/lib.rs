//! Standard and multilevel Monte Carlo valuation of European payoffs on
//! scalar SDEs.
//!
//! The numerical core is generic over [`Scalar`] (`f32` or `f64`); the
//! `*64` and `*32` aliases below fix the precision.
//!
//! ```
//! use mlmc::{mlmc, Gbm64, MlmcConfig, PayoffKind, PayoffSpec64, SchemeKind};
//!
//! let model = Gbm64::reference();
//! let payoff = PayoffSpec64::reference(PayoffKind::Call);
//! let est = mlmc(&model, &payoff, SchemeKind::EulerMaruyama, 0.2, &MlmcConfig::default(), 7).unwrap();
//! assert!((est.value - 12.336).abs() < 0.6);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod estimators;
pub mod noise;
pub mod oracles;
pub mod payoffs;
pub mod scalar;
pub mod schemes;
pub mod sde;

pub use error::{Error, Result};
pub use estimators::{
    bias_remainder, complexity_bound, fit_rates, fixed_finest_level, level_estimator, mlmc,
    standard_mc, standard_mc_level, ComplexityBound, Estimate, LevelSampler, LevelStats,
    MlmcConfig, MlmcMode, RateEstimates, Regime, StandardMcConfig, ALPHA_FLOOR, BALANCE_BAND,
    CHUNK_SIZE, STANDARD_MC_STREAM, Z_95,
};
pub use noise::{
    brownian_increments, coarsen_increments, derive_seed, inverse_normal_cdf, IncrementPath,
    NoiseStream,
};
pub use oracles::{black_scholes_call, black_scholes_digital, black_scholes_put, norm_cdf, BsParams};
pub use payoffs::{PayoffKind, PayoffSpec};
pub use scalar::Scalar;
pub use schemes::{
    coupled_terminal, integrate_terminal, level_stepsize, level_steps, level_terminal,
    CoupledTerminal, SchemeKind,
};
pub use sde::{gbm_exact_terminal, paley_wiener_eval, FnModel, Gbm, SdeModel};

pub type Gbm64 = Gbm<f64>;
pub type Gbm32 = Gbm<f32>;
pub type FnModel64 = FnModel<f64>;
pub type PayoffSpec64 = PayoffSpec<f64>;
pub type PayoffSpec32 = PayoffSpec<f32>;
pub type IncrementPath64 = IncrementPath<f64>;
pub type LevelStats64 = LevelStats<f64>;
pub type Estimate64 = Estimate<f64>;
pub type Estimate32 = Estimate<f32>;
pub type RateEstimates64 = RateEstimates<f64>;
pub type CoupledTerminal64 = CoupledTerminal<f64>;
