//! Exponent fitting for the level statistics and the cost bound of the
//! multilevel complexity theorem.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimators::stats::LevelStats;
use crate::scalar::Scalar;

/// Ordinary least squares `y ≈ slope · x + intercept`. Needs two points.
pub(crate) fn ols<T: Scalar>(points: &[(T, T)]) -> Option<(T, T)> {
    if points.len() < 2 {
        return None;
    }
    let n = T::of_u64(points.len() as u64);
    let (sx, sy) = points.iter().fold((T::zero(), T::zero()), |(a, b), &(x, y)| (a + x, b + y));
    let (mx, my) = (sx / n, sy / n);
    let (sxy, sxx) = points.iter().fold((T::zero(), T::zero()), |(a, b), &(x, y)| {
        (a + (x - mx) * (y - my), b + (x - mx) * (x - mx))
    });
    if sxx == T::zero() {
        return None;
    }
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

fn log_base<T: Scalar>(value: T, base: T) -> T {
    value.ln() / base.ln()
}

/// `−slope` of `log_M |value(s)|` over levels `l >= 1`, skipping zeros.
/// `None` when fewer than two usable levels exist.
fn decay_rate<T: Scalar>(
    levels: &[LevelStats<T>],
    refinement_factor: u32,
    value: impl Fn(&LevelStats<T>) -> Option<T>,
) -> Option<T> {
    let base = T::of_u64(u64::from(refinement_factor));
    let points: Vec<(T, T)> = levels
        .iter()
        .filter(|s| s.level >= 1)
        .filter_map(|s| value(s).map(|v| (s.level, v)))
        .filter(|(_, v)| *v != T::zero())
        .map(|(l, v)| (T::of_u64(u64::from(l)), log_base(v.abs(), base)))
        .collect();
    ols(&points).map(|(slope, _)| -slope)
}

/// Weak rate from the level means, for the adaptive driver.
pub(crate) fn fit_alpha<T: Scalar>(levels: &[LevelStats<T>], refinement_factor: u32) -> Option<T> {
    decay_rate(levels, refinement_factor, LevelStats::mean)
}

/// Variance decay rate from the level variances, for the adaptive driver.
pub(crate) fn fit_beta<T: Scalar>(levels: &[LevelStats<T>], refinement_factor: u32) -> Option<T> {
    decay_rate(levels, refinement_factor, LevelStats::variance)
}

/// Fitted `(α, β, γ)` with the matching constants `c = M^intercept`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateEstimates<T> {
    /// Weak rate: `|E[P_l − P_{l−1}]| ≈ c1 M^{−α l}`.
    pub alpha: T,
    /// Variance decay: `v_l ≈ c2 M^{−β l}`.
    pub beta: T,
    /// Cost growth: `C_l / N_l ≈ c3 M^{γ l}`.
    pub gamma: T,
    pub c1: T,
    pub c2: T,
    pub c3: T,
    /// Levels left out of a fit because their mean or variance was exactly zero.
    pub excluded_levels: Vec<u32>,
}

/// Least-squares exponents over the levels `l >= 1` of `levels`.
pub fn fit_rates<T: Scalar>(
    levels: &[LevelStats<T>],
    refinement_factor: u32,
) -> Result<RateEstimates<T>> {
    if refinement_factor < 2 {
        return Err(Error::invalid("refinement_factor", "must be >= 2"));
    }
    let base = T::of_u64(u64::from(refinement_factor));
    let usable: Vec<&LevelStats<T>> =
        levels.iter().filter(|s| s.level >= 1 && s.n_samples >= 2).collect();

    let mut excluded = Vec::new();
    let mut mean_pts = Vec::new();
    let mut var_pts = Vec::new();
    let mut cost_pts = Vec::new();
    for s in &usable {
        let l = T::of_u64(u64::from(s.level));
        let mean = s.mean().expect("n_samples >= 2");
        let var = s.variance().expect("n_samples >= 2");
        if mean == T::zero() || var == T::zero() {
            excluded.push(s.level);
        }
        if mean != T::zero() {
            mean_pts.push((l, log_base(mean.abs(), base)));
        }
        if var != T::zero() {
            var_pts.push((l, log_base(var, base)));
        }
        let per_sample = s.cost_per_sample().expect("n_samples >= 2");
        cost_pts.push((l, log_base(per_sample, base)));
    }

    let fit = |pts: &[(T, T)], rate: &'static str| -> Result<(T, T)> {
        if pts.len() < 3 {
            return Err(Error::TooFewLevels { rate, usable: pts.len() });
        }
        ols(pts).ok_or(Error::TooFewLevels { rate, usable: pts.len() })
    };
    let (a_slope, a_icpt) = fit(&mean_pts, "alpha")?;
    let (b_slope, b_icpt) = fit(&var_pts, "beta")?;
    let (g_slope, g_icpt) = fit(&cost_pts, "gamma")?;
    Ok(RateEstimates {
        alpha: -a_slope,
        beta: -b_slope,
        gamma: g_slope,
        c1: base.powf(a_icpt),
        c2: base.powf(b_icpt),
        c3: base.powf(g_icpt),
        excluded_levels: excluded,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Regime {
    BetaGtGamma,
    BetaEqGamma,
    BetaLtGamma,
}

/// `|β − γ|` below this counts as the balanced regime.
pub const BALANCE_BAND: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplexityBound<T> {
    pub regime: Regime,
    /// Cost bound with unit constant.
    pub predicted_cost: T,
}

/// Cost bound of the multilevel complexity theorem with `c4 = 1`:
/// `ε^-2` when `β > γ`, `ε^-2 (ln ε)^2` when `β = γ`, and
/// `ε^{-2-(γ-β)/α}` when `β < γ`.
pub fn complexity_bound<T: Scalar>(rates: &RateEstimates<T>, epsilon: T) -> Result<ComplexityBound<T>> {
    let (alpha, beta, gamma) = (rates.alpha, rates.beta, rates.gamma);
    let half = T::of(0.5);
    if !(alpha > T::zero() && beta > T::zero() && gamma > T::zero()) {
        return Err(Error::invalid("rates", "alpha, beta and gamma must be positive"));
    }
    if alpha < half * beta.min(gamma) {
        return Err(Error::HypothesisViolated {
            alpha: alpha.as_f64(),
            beta: beta.as_f64(),
            gamma: gamma.as_f64(),
        });
    }
    if !(epsilon > T::zero() && epsilon < (-T::one()).exp()) {
        return Err(Error::invalid("epsilon", format!("must lie in (0, 1/e), got {epsilon}")));
    }
    let base = epsilon.powi(-2);
    let bound = if (beta - gamma).abs() < T::of(BALANCE_BAND) {
        let log = epsilon.ln();
        ComplexityBound { regime: Regime::BetaEqGamma, predicted_cost: base * log * log }
    } else if beta > gamma {
        ComplexityBound { regime: Regime::BetaGtGamma, predicted_cost: base }
    } else {
        ComplexityBound {
            regime: Regime::BetaLtGamma,
            predicted_cost: epsilon.powf(-T::of(2.0) - (gamma - beta) / alpha),
        }
    };
    Ok(bound)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Two-sample level with the given mean and unbiased variance.
    fn synthetic(level: u32, mean: f64, var: f64, cost_per_sample: f64) -> LevelStats<f64> {
        let h = (var / 2.0).sqrt();
        let (a, b) = (mean + h, mean - h);
        LevelStats {
            level,
            n_samples: 2,
            sum_y: a + b,
            sum_y2: a * a + b * b,
            cost: (2.0 * cost_per_sample) as u64,
        }
    }

    fn rates(alpha: f64, beta: f64, gamma: f64) -> RateEstimates<f64> {
        RateEstimates { alpha, beta, gamma, c1: 1.0, c2: 1.0, c3: 1.0, excluded_levels: vec![] }
    }

    #[test]
    fn ols_exact_line() {
        let pts: [(f64, f64); 3] = [(0.0, 1.0), (1.0, 3.0), (2.0, 5.0)];
        let (s, i) = ols(&pts).unwrap();
        assert!((s - 2.0).abs() < 1e-14 && (i - 1.0).abs() < 1e-14);
        assert!(ols(&pts[..1]).is_none());
        assert!(ols(&[(1.0, 1.0), (1.0, 2.0)]).is_none());
    }

    #[test]
    fn exact_geometric_decay() {
        let levels: Vec<_> = (1..=6)
            .map(|l| {
                let p = 2f64.powi(-(l as i32));
                synthetic(l, p, p, 2f64.powi(l as i32))
            })
            .collect();
        let r = fit_rates(&levels, 2).unwrap();
        assert!((r.alpha - 1.0).abs() < 1e-10, "{r:?}");
        assert!((r.beta - 1.0).abs() < 1e-10);
        assert!((r.gamma - 1.0).abs() < 1e-10);
        assert!((r.c1 - 1.0).abs() < 1e-9 && (r.c2 - 1.0).abs() < 1e-9 && (r.c3 - 1.0).abs() < 1e-9);
        assert!(r.excluded_levels.is_empty());
    }

    #[test]
    fn level_zero_is_ignored() {
        let mut levels = vec![synthetic(0, 12.0, 200.0, 1.0)];
        levels.extend((1..=4).map(|l| synthetic(l, 4f64.powi(-(l as i32)), 0.1, 8f64.powi(l as i32))));
        let r = fit_rates(&levels, 4).unwrap();
        assert!((r.alpha - 1.0).abs() < 1e-10);
        assert!(r.beta.abs() < 1e-10);
        assert!((r.gamma - 1.5).abs() < 1e-10);
    }

    #[test]
    fn zero_mean_levels_are_flagged() {
        let mut levels: Vec<_> = (1..=4).map(|l| synthetic(l, 2f64.powi(-(l as i32)), 1.0, 2.0)).collect();
        levels.push(synthetic(5, 0.0, 1.0, 2.0));
        let r = fit_rates(&levels, 2).unwrap();
        assert_eq!(r.excluded_levels, vec![5]);
        assert!((r.alpha - 1.0).abs() < 1e-10);
    }

    #[test]
    fn too_few_levels() {
        let levels: Vec<_> = (0..=2).map(|l| synthetic(l, 0.5, 0.5, 2.0)).collect();
        assert_eq!(
            fit_rates(&levels, 2),
            Err(Error::TooFewLevels { rate: "alpha", usable: 2 })
        );
        let mut zeros: Vec<_> = (1..=3).map(|l| synthetic(l, 0.5, 0.5, 2.0)).collect();
        zeros[0] = synthetic(1, 0.0, 0.5, 2.0);
        assert!(matches!(fit_rates(&zeros, 2), Err(Error::TooFewLevels { rate: "alpha", .. })));
    }

    #[test]
    fn alpha_for_driver_needs_two_points() {
        let levels: Vec<_> = (0..=2).map(|l| synthetic(l, 2f64.powi(-(l as i32)), 1.0, 1.0)).collect();
        assert!((fit_alpha(&levels, 2).unwrap() - 1.0).abs() < 1e-12);
        assert!(fit_alpha(&levels[..2], 2).is_none());
        let decaying: Vec<_> = (0..=3).map(|l| synthetic(l, 1.0, 4f64.powi(-(l as i32)), 1.0)).collect();
        assert!((fit_beta(&decaying, 2).unwrap() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn regime_examples() {
        let b = complexity_bound(&rates(1.0, 2.0, 1.0), 0.01).unwrap();
        assert_eq!(b.regime, Regime::BetaGtGamma);
        assert!((b.predicted_cost - 1e4).abs() < 1e-8);

        let eps = (-2.0f64).exp();
        let b = complexity_bound(&rates(1.0, 1.0, 1.0), eps).unwrap();
        assert_eq!(b.regime, Regime::BetaEqGamma);
        assert!((b.predicted_cost - 4.0 * 4f64.exp()).abs() < 1e-10);

        let b = complexity_bound(&rates(1.0, 0.5, 1.0), 0.1).unwrap();
        assert_eq!(b.regime, Regime::BetaLtGamma);
        assert!((b.predicted_cost - 10f64.powf(2.5)).abs() < 1e-9);
    }

    #[test]
    fn theorem_preconditions() {
        assert!(matches!(
            complexity_bound(&rates(0.4, 1.0, 1.0), 0.01),
            Err(Error::HypothesisViolated { .. })
        ));
        assert!(complexity_bound(&rates(1.0, 1.0, 1.0), 0.5).is_err());
        assert!(complexity_bound(&rates(1.0, 1.0, 1.0), 0.0).is_err());
    }
}
