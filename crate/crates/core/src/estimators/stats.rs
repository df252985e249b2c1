use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Two-sided 95% normal quantile used for every confidence half-width.
pub const Z_95: f64 = 1.96;

/// Running sums for the samples of one level.
///
/// At level 0 the samples are payoffs `P_0`; above it they are the coupled
/// differences `P_l − P_{l−1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevelStats<T> {
    pub level: u32,
    pub n_samples: u64,
    pub sum_y: T,
    pub sum_y2: T,
    /// Integration steps charged to this level.
    pub cost: u64,
}

impl<T: Scalar> LevelStats<T> {
    pub fn empty(level: u32) -> Self {
        Self { level, n_samples: 0, sum_y: T::zero(), sum_y2: T::zero(), cost: 0 }
    }

    #[inline]
    pub fn push(&mut self, y: T, cost: u64) {
        self.n_samples += 1;
        self.sum_y = self.sum_y + y;
        self.sum_y2 = self.sum_y2 + y * y;
        self.cost += cost;
    }

    /// Field-wise sum; both operands must describe the same level.
    pub fn merge(&mut self, other: &Self) -> Result<()> {
        if self.level != other.level {
            return Err(Error::LevelMismatch { left: self.level, right: other.level });
        }
        self.n_samples += other.n_samples;
        self.sum_y = self.sum_y + other.sum_y;
        self.sum_y2 = self.sum_y2 + other.sum_y2;
        self.cost += other.cost;
        Ok(())
    }

    pub fn mean(&self) -> Option<T> {
        (self.n_samples > 0).then(|| self.sum_y / T::of_u64(self.n_samples))
    }

    /// Unbiased sample variance. `None` below two samples.
    ///
    /// Values within the rounding error of the accumulated sums,
    /// `n · ε_mach · sum_y2 / n`, are reported as exactly zero.
    pub fn variance(&self) -> Option<T> {
        if self.n_samples < 2 {
            return None;
        }
        let n = T::of_u64(self.n_samples);
        let second = self.sum_y2 / n;
        let mean = self.sum_y / n;
        let spread = second - mean * mean;
        if spread <= n * T::epsilon() * second {
            return Some(T::zero());
        }
        Some(spread * n / (n - T::one()))
    }

    /// `v_l / N_l`, the variance of this level's sample mean.
    pub fn variance_of_mean(&self) -> Option<T> {
        self.variance().map(|v| v / T::of_u64(self.n_samples))
    }

    /// Average integration steps per sample.
    pub fn cost_per_sample(&self) -> Option<T> {
        (self.n_samples > 0).then(|| T::of_u64(self.cost) / T::of_u64(self.n_samples))
    }
}

/// A priced result with its error decomposition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Estimate<T> {
    /// Sum of the per-level sample means.
    pub value: T,
    /// `Σ v_l / N_l` over levels with at least two samples.
    pub statistical_variance: T,
    pub bias_estimate: T,
    /// `1.96 · √statistical_variance + |bias_estimate|`.
    pub half_width: T,
    pub total_cost: u64,
    pub levels: Vec<LevelStats<T>>,
}

impl<T: Scalar> Estimate<T> {
    /// Assembles an estimate; levels are ordered by index first so the result
    /// does not depend on the order they were supplied in.
    pub fn from_levels(mut levels: Vec<LevelStats<T>>, bias_estimate: T) -> Self {
        levels.sort_by_key(|s| s.level);
        let value = levels.iter().filter_map(|s| s.mean()).fold(T::zero(), |a, m| a + m);
        let statistical_variance = levels
            .iter()
            .filter_map(|s| s.variance_of_mean())
            .fold(T::zero(), |a, v| a + v);
        let total_cost = levels.iter().map(|s| s.cost).sum();
        let half_width = T::of(Z_95) * statistical_variance.sqrt() + bias_estimate.abs();
        Self { value, statistical_variance, bias_estimate, half_width, total_cost, levels }
    }

    /// Finest level index used.
    pub fn max_level(&self) -> u32 {
        self.levels.last().map_or(0, |s| s.level)
    }

    /// Root-sum-square of the bias and the 95% statistical half-width. The
    /// estimators aim to keep this at or below the requested tolerance.
    pub fn rms_half_width(&self) -> T {
        let stat = T::of(Z_95) * self.statistical_variance.sqrt();
        (stat * stat + self.bias_estimate * self.bias_estimate).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stats_of(level: u32, ys: &[f64]) -> LevelStats<f64> {
        let mut s = LevelStats::empty(level);
        for &y in ys {
            s.push(y, 3);
        }
        s
    }

    #[test]
    fn mean_and_variance() {
        let s = stats_of(1, &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(s.mean(), Some(2.5));
        assert!((s.variance().unwrap() - 5.0 / 3.0).abs() < 1e-14);
        assert_eq!(s.cost, 12);
        assert_eq!(s.cost_per_sample(), Some(3.0));
        assert_eq!(stats_of(0, &[4.0]).variance(), None);
        assert_eq!(LevelStats::<f64>::empty(0).mean(), None);
    }

    #[test]
    fn variance_never_negative() {
        let s = stats_of(0, &[0.1; 10]);
        assert!(s.variance().unwrap() >= 0.0);
    }

    #[test]
    fn merge_equals_union() {
        let mut a = stats_of(2, &[1.0, -2.0]);
        let b = stats_of(2, &[0.5, 4.0, 3.0]);
        a.merge(&b).unwrap();
        assert_eq!(a, stats_of(2, &[1.0, -2.0, 0.5, 4.0, 3.0]));
        assert_eq!(
            a.merge(&stats_of(3, &[1.0])),
            Err(Error::LevelMismatch { left: 2, right: 3 })
        );
    }

    #[test]
    fn estimate_sums_levels_in_order() {
        let l0 = stats_of(0, &[10.0, 12.0]);
        let l1 = stats_of(1, &[0.5, 0.7, 0.6]);
        let forward = Estimate::from_levels(vec![l0, l1], 0.01);
        let reversed = Estimate::from_levels(vec![l1, l0], 0.01);
        assert_eq!(forward, reversed);
        assert!((forward.value - 11.6).abs() < 1e-14);
        assert_eq!(forward.total_cost, 15);
        let var = 2.0 / 2.0 + 0.01 / 3.0;
        assert!((forward.statistical_variance - var).abs() < 1e-12);
        assert!((forward.half_width - (1.96 * var.sqrt() + 0.01)).abs() < 1e-12);
        assert_eq!(forward.max_level(), 1);
    }

    #[test]
    fn single_sample_levels_add_no_variance() {
        let e = Estimate::from_levels(vec![stats_of(0, &[5.0])], 0.0);
        assert_eq!(e.statistical_variance, 0.0);
        assert_eq!(e.value, 5.0);
    }
}
