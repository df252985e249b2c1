//! Single-resolution Monte Carlo with the step size tied to the tolerance.

use crate::error::{Error, Result};
use crate::estimators::sampling::LevelSampler;
use crate::estimators::stats::{Estimate, Z_95};
use crate::noise::derive_seed;
use crate::payoffs::PayoffSpec;
use crate::scalar::Scalar;
use crate::schemes::{level_stepsize, SchemeKind};
use crate::sde::SdeModel;

/// Seed-derivation index separating standard-MC streams from multilevel ones.
pub const STANDARD_MC_STREAM: u64 = 0x5354_445f_4d43;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StandardMcConfig {
    /// Step sizes are restricted to the grid `T / M^l`.
    pub refinement_factor: u32,
    /// Paths used to estimate the payoff variance before sizing the run.
    pub pilot_paths: u64,
    /// Tolerances needing a finer level than this fail with `NoConvergence`.
    pub l_max: u32,
}

impl Default for StandardMcConfig {
    fn default() -> Self {
        Self { refinement_factor: 2, pilot_paths: 1000, l_max: 20 }
    }
}

/// Finest level whose step `T / M^l` is still at most `epsilon`.
pub fn standard_mc_level<T: Scalar>(epsilon: T, refinement_factor: u32, horizon: T) -> Result<u32> {
    (0..64)
        .find(|&l| level_stepsize(l, refinement_factor, horizon) <= epsilon)
        .ok_or_else(|| Error::invalid("epsilon", format!("{epsilon} needs more than 63 levels")))
}

/// Standard Monte Carlo to tolerance `epsilon`.
///
/// The step is the largest grid step `Δt ≤ ε`. After a pilot run the path
/// count is raised to `N = ⌈2 · 1.96² · v / ε²⌉`, so the 95% statistical
/// half-width is at most `ε/√2`. Every path is also integrated at `M·Δt`
/// on the same increments; the mean difference divided by `M − 1` is the
/// reported bias estimate, and those coarse steps count towards the cost.
pub fn standard_mc<T: Scalar, S: SdeModel<T> + ?Sized>(
    model: &S,
    payoff: &PayoffSpec<T>,
    scheme: SchemeKind,
    epsilon: T,
    config: &StandardMcConfig,
    seed: u64,
) -> Result<Estimate<T>> {
    if !(epsilon > T::zero()) || !epsilon.is_finite() {
        return Err(Error::invalid("epsilon", format!("must be positive, got {epsilon}")));
    }
    if config.pilot_paths < 2 {
        return Err(Error::invalid("pilot_paths", "need at least two pilot paths"));
    }
    let m = config.refinement_factor;
    let sampler = LevelSampler::new(model, payoff, scheme, m, derive_seed(seed, STANDARD_MC_STREAM))?;
    let level = standard_mc_level(epsilon, m, model.horizon())?;
    if level > config.l_max {
        return Err(Error::NoConvergence { l_max: config.l_max });
    }

    let (mut payoffs, mut diffs) = sampler.sample_single(level, 0..config.pilot_paths)?;
    let pilot_var = payoffs.variance().unwrap_or_else(T::zero);
    let target = T::of(2.0 * Z_95 * Z_95) * pilot_var / (epsilon * epsilon);
    let wanted = target.ceil().to_u64().unwrap_or(u64::MAX).max(config.pilot_paths);
    if wanted > config.pilot_paths {
        let (more_payoffs, more_diffs) = sampler.sample_single(level, config.pilot_paths..wanted)?;
        payoffs.merge(&more_payoffs)?;
        diffs.merge(&more_diffs)?;
    }

    let bias = if level == 0 {
        T::zero()
    } else {
        diffs.mean().unwrap_or_else(T::zero) / T::of_u64(u64::from(m) - 1)
    };
    Ok(Estimate::from_levels(vec![payoffs], bias))
}
