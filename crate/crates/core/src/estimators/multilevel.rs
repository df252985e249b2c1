//! The multilevel estimator `Σ_{l=0..L} Ŷ_l` and its sample-allocation drivers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::rates::{fit_alpha, fit_beta};
use crate::estimators::sampling::LevelSampler;
use crate::estimators::stats::{Estimate, LevelStats, Z_95};
use crate::payoffs::PayoffSpec;
use crate::scalar::Scalar;
use crate::schemes::{level_stepsize, SchemeKind};
use crate::sde::SdeModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MlmcMode {
    /// `L = ⌈log(1/ε) / log M⌉` and `N_l ∝ ε⁻² (L+1) Δt_l`.
    FixedL,
    /// Variance-optimal `N_l` and levels added until the bias test passes.
    Adaptive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MlmcConfig {
    pub refinement_factor: u32,
    pub mode: MlmcMode,
    /// Pilot samples on every newly opened level.
    pub n_warm: u64,
    /// Finest level the adaptive driver may open.
    pub l_max: u32,
    /// Cap on top-up rounds while the allocation settles.
    pub max_reallocations: usize,
}

impl Default for MlmcConfig {
    fn default() -> Self {
        Self {
            refinement_factor: 2,
            mode: MlmcMode::Adaptive,
            n_warm: 100,
            l_max: 20,
            max_reallocations: 50,
        }
    }
}

/// Lower bound on the fitted weak rate inside the bias test.
pub const ALPHA_FLOOR: f64 = 0.5;

/// Number of levels above 0 used by the fixed schedule, `⌈log(1/ε)/log M⌉`.
pub fn fixed_finest_level<T: Scalar>(epsilon: T, refinement_factor: u32) -> u32 {
    let ratio = (T::one() / epsilon).ln() / T::of_u64(u64::from(refinement_factor)).ln();
    // Absorb rounding when 1/ε is an exact power of M.
    let l = (ratio - T::of(1e-9)).ceil();
    l.max(T::zero()).to_u32().unwrap_or(u32::MAX)
}

fn floored_rate<T: Scalar>(fitted: Option<T>) -> T {
    fitted.unwrap_or_else(|| T::of(ALPHA_FLOOR)).max(T::of(ALPHA_FLOOR))
}

/// Replaces `x_l` for `l >= 2` by `max(x_l, x_{l−1} / (2 M^rate))`, in level
/// order. `values` must be indexed by consecutive levels from 0.
fn extrapolation_floor<T: Scalar>(values: &mut [T], refinement_factor: u32, rate: T) {
    let shrink = T::of(2.0) * T::of_u64(u64::from(refinement_factor)).powf(rate);
    for l in 2..values.len() {
        values[l] = values[l].max(values[l - 1] / shrink);
    }
}

/// Richardson-style remainder `max(|Ŷ_L|, |Ŷ_{L−1}| / M^α) / (M^α − 1)`
/// with `α` fitted over the levels `l >= 1` and floored at 0.5. Until three
/// such levels exist the floor itself is used; two points cannot show that
/// the means have settled into geometric decay.
///
/// `|Ŷ_l|` for `l >= 2` is first raised to at least `|Ŷ_{l−1}| / (2 M^α)`, so
/// a level whose samples happened to agree exactly cannot pass the test on
/// its own. `levels` must hold consecutive levels starting at 0.
pub fn bias_remainder<T: Scalar>(levels: &[LevelStats<T>], refinement_factor: u32) -> T {
    let n = levels.len();
    if n < 2 {
        return T::zero();
    }
    let alpha = if n >= 4 { floored_rate(fit_alpha(levels, refinement_factor)) } else { T::of(ALPHA_FLOOR) };
    let mut means: Vec<T> =
        levels.iter().map(|s| s.mean().unwrap_or_else(T::zero).abs()).collect();
    extrapolation_floor(&mut means, refinement_factor, alpha);
    let decay = T::of_u64(u64::from(refinement_factor)).powf(alpha);
    let mut worst = means[n - 1];
    if n >= 3 {
        worst = worst.max(means[n - 2] / decay);
    }
    worst / (decay - T::one())
}

struct Driver<'a, T, S: ?Sized> {
    sampler: LevelSampler<'a, T, S>,
    epsilon: T,
    config: &'a MlmcConfig,
    horizon: T,
    levels: Vec<LevelStats<T>>,
    pending: Vec<u64>,
}

impl<'a, T: Scalar, S: SdeModel<T> + ?Sized> Driver<'a, T, S> {
    fn open_level(&mut self) {
        let level = self.levels.len() as u32;
        self.levels.push(LevelStats::empty(level));
        self.pending.push(self.config.n_warm);
    }

    fn draw_pending(&mut self) -> Result<()> {
        for (stats, extra) in self.levels.iter_mut().zip(self.pending.iter_mut()) {
            if *extra > 0 {
                let start = stats.n_samples;
                let more = self.sampler.sample(stats.level, start..start + *extra)?;
                stats.merge(&more)?;
                *extra = 0;
            }
        }
        Ok(())
    }

    /// Sample variances, with the extrapolation floor applied above level 1
    /// so that a pilot which saw no variation still gets samples.
    fn variances(&self) -> Vec<T> {
        let mut v: Vec<T> = self.levels.iter().map(|s| s.variance().unwrap_or_else(T::zero)).collect();
        let beta = floored_rate(fit_beta(&self.levels, self.config.refinement_factor));
        extrapolation_floor(&mut v, self.config.refinement_factor, beta);
        v
    }

    fn stepsizes(&self) -> Vec<T> {
        self.levels
            .iter()
            .map(|s| level_stepsize(s.level, self.config.refinement_factor, self.horizon))
            .collect()
    }

    /// Scale so that `Σ v_l / N_l ≤ ε² / (2 · 1.96²)`.
    fn budget(&self) -> T {
        T::of(2.0 * Z_95 * Z_95) / (self.epsilon * self.epsilon)
    }

    fn optimal_counts(&self) -> Vec<T> {
        let v = self.variances();
        let dt = self.stepsizes();
        let sum: T = v.iter().zip(&dt).fold(T::zero(), |a, (&v, &dt)| a + (v / dt).sqrt());
        v.iter().zip(&dt).map(|(&v, &dt)| self.budget() * (v * dt).sqrt() * sum).collect()
    }

    fn fixed_counts(&self) -> Vec<T> {
        let v = self.variances();
        let dt = self.stepsizes();
        let sum: T = v.iter().zip(&dt).fold(T::zero(), |a, (&v, &dt)| a + v / dt);
        dt.iter().map(|&dt| self.budget() * dt * sum).collect()
    }

    /// Minimum counts for levels `l >= 1` whose differences have all been
    /// identical while level 0 varies: such a level has not been resolved
    /// yet, so its count doubles, up to the level-0 count.
    fn resolution_counts(&self) -> Vec<u64> {
        let n0 = self.levels[0].n_samples;
        let noisy = self.levels[0].variance().is_some_and(|v| v > T::zero());
        self.levels
            .iter()
            .map(|s| {
                let unresolved = s.level >= 1 && noisy && s.variance() == Some(T::zero());
                if unresolved {
                    (2 * s.n_samples).min(n0)
                } else {
                    0
                }
            })
            .collect()
    }

    /// Tops levels up to their target counts until no level needs more
    /// samples, or the reallocation cap is reached.
    fn settle(&mut self) -> Result<()> {
        for _ in 0..=self.config.max_reallocations {
            self.draw_pending()?;
            let targets = match self.config.mode {
                MlmcMode::Adaptive => self.optimal_counts(),
                MlmcMode::FixedL => self.fixed_counts(),
            };
            let resolved = self.resolution_counts();
            let mut settled = true;
            let rows = self.levels.iter().zip(self.pending.iter_mut()).zip(targets).zip(resolved);
            for (((stats, extra), target), floor) in rows {
                let want = target.ceil().to_u64().unwrap_or(u64::MAX).max(floor);
                *extra = want.saturating_sub(stats.n_samples);
                settled &= *extra == 0;
            }
            if settled {
                return Ok(());
            }
        }
        self.pending.iter_mut().for_each(|p| *p = 0);
        Ok(())
    }
}

/// Multilevel Monte Carlo estimate of `E[h(X(T))]` to tolerance `epsilon`.
///
/// Both drivers aim for a bias estimate at most `ε/√2` and a 95% statistical
/// half-width `1.96 √(Σ v_l/N_l)` at most `ε/√2`. Level `l` draws its paths
/// from streams `(seed, l, path)`, independent across levels.
pub fn mlmc<T: Scalar, S: SdeModel<T> + ?Sized>(
    model: &S,
    payoff: &PayoffSpec<T>,
    scheme: SchemeKind,
    epsilon: T,
    config: &MlmcConfig,
    seed: u64,
) -> Result<Estimate<T>> {
    if !(epsilon > T::zero()) || !epsilon.is_finite() {
        return Err(Error::invalid("epsilon", format!("must be positive, got {epsilon}")));
    }
    if config.n_warm < 2 {
        return Err(Error::invalid("n_warm", "need at least two pilot samples per level"));
    }
    if config.l_max < 2 {
        return Err(Error::invalid("l_max", "must be at least 2"));
    }
    let sampler = LevelSampler::new(model, payoff, scheme, config.refinement_factor, seed)?;
    let mut driver = Driver {
        sampler,
        epsilon,
        config,
        horizon: model.horizon(),
        levels: Vec::new(),
        pending: Vec::new(),
    };
    let bias_target = epsilon / T::SQRT_2();

    match config.mode {
        MlmcMode::FixedL => {
            let finest = fixed_finest_level(epsilon, config.refinement_factor);
            if finest > config.l_max {
                return Err(Error::NoConvergence { l_max: config.l_max });
            }
            for _ in 0..=finest {
                driver.open_level();
            }
            driver.settle()?;
        }
        MlmcMode::Adaptive => {
            for _ in 0..=2 {
                driver.open_level();
            }
            loop {
                driver.settle()?;
                if bias_remainder(&driver.levels, config.refinement_factor) <= bias_target {
                    break;
                }
                if driver.levels.len() as u32 > config.l_max {
                    return Err(Error::NoConvergence { l_max: config.l_max });
                }
                driver.open_level();
            }
        }
    }

    let bias = bias_remainder(&driver.levels, config.refinement_factor);
    Ok(Estimate::from_levels(driver.levels, bias))
}
