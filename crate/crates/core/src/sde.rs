//! Scalar Itô SDE models `dX = f(X) dt + g(X) dW`, `X(0) = x0`, on `[0, T]`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Coefficients and initial data of a scalar SDE.
///
/// Implementors are plain values; integrators are monomorphized over them so
/// the coefficient calls inline into the time-stepping loop.
pub trait SdeModel<T: Scalar>: Send + Sync {
    fn drift(&self, x: T) -> T;

    fn diffusion(&self, x: T) -> T;

    /// `g'(x)`, needed by the Milstein correction. `None` when unavailable.
    fn diffusion_deriv(&self, _x: T) -> Option<T> {
        None
    }

    fn has_diffusion_deriv(&self) -> bool {
        false
    }

    fn x0(&self) -> T;

    fn horizon(&self) -> T;
}

fn check_horizon<T: Scalar>(horizon: T) -> Result<()> {
    if horizon > T::zero() && horizon.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid("horizon", format!("must be positive and finite, got {horizon}")))
    }
}

/// Geometric Brownian motion, `f(x) = mu x`, `g(x) = sigma x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gbm<T> {
    mu: T,
    sigma: T,
    x0: T,
    horizon: T,
}

impl<T: Scalar> Gbm<T> {
    pub fn new(mu: T, sigma: T, x0: T, horizon: T) -> Result<Self> {
        check_horizon(horizon)?;
        if !(mu.is_finite() && sigma.is_finite() && x0.is_finite()) {
            return Err(Error::invalid("gbm", "coefficients must be finite"));
        }
        Ok(Self { mu, sigma, x0, horizon })
    }

    /// The asset model of the benchmark study: `mu = 0.05`, `sigma = 0.25`,
    /// `x0 = 100`, `T = 1`.
    pub fn reference() -> Self {
        Self { mu: T::of(0.05), sigma: T::of(0.25), x0: T::of(100.0), horizon: T::one() }
    }

    pub fn mu(&self) -> T {
        self.mu
    }

    pub fn sigma(&self) -> T {
        self.sigma
    }
}

impl<T: Scalar> SdeModel<T> for Gbm<T> {
    #[inline(always)]
    fn drift(&self, x: T) -> T {
        self.mu * x
    }

    #[inline(always)]
    fn diffusion(&self, x: T) -> T {
        self.sigma * x
    }

    #[inline(always)]
    fn diffusion_deriv(&self, _x: T) -> Option<T> {
        Some(self.sigma)
    }

    fn has_diffusion_deriv(&self) -> bool {
        true
    }

    fn x0(&self) -> T {
        self.x0
    }

    fn horizon(&self) -> T {
        self.horizon
    }
}

type Coefficient<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// SDE given by arbitrary coefficient closures.
#[derive(Clone)]
pub struct FnModel<T> {
    drift: Coefficient<T>,
    diffusion: Coefficient<T>,
    diffusion_deriv: Option<Coefficient<T>>,
    x0: T,
    horizon: T,
}

impl<T: Scalar> FnModel<T> {
    pub fn new(
        drift: impl Fn(T) -> T + Send + Sync + 'static,
        diffusion: impl Fn(T) -> T + Send + Sync + 'static,
        x0: T,
        horizon: T,
    ) -> Result<Self> {
        check_horizon(horizon)?;
        Ok(Self {
            drift: Arc::new(drift),
            diffusion: Arc::new(diffusion),
            diffusion_deriv: None,
            x0,
            horizon,
        })
    }

    pub fn with_diffusion_deriv(mut self, deriv: impl Fn(T) -> T + Send + Sync + 'static) -> Self {
        self.diffusion_deriv = Some(Arc::new(deriv));
        self
    }
}

impl<T: Scalar> fmt::Debug for FnModel<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnModel")
            .field("x0", &self.x0)
            .field("horizon", &self.horizon)
            .field("has_diffusion_deriv", &self.diffusion_deriv.is_some())
            .finish_non_exhaustive()
    }
}

impl<T: Scalar> SdeModel<T> for FnModel<T> {
    fn drift(&self, x: T) -> T {
        (self.drift)(x)
    }

    fn diffusion(&self, x: T) -> T {
        (self.diffusion)(x)
    }

    fn diffusion_deriv(&self, x: T) -> Option<T> {
        self.diffusion_deriv.as_ref().map(|d| d(x))
    }

    fn has_diffusion_deriv(&self) -> bool {
        self.diffusion_deriv.is_some()
    }

    fn x0(&self) -> T {
        self.x0
    }

    fn horizon(&self) -> T {
        self.horizon
    }
}

/// Exact GBM solution `x0 · exp((mu − sigma²/2) t + sigma W(t))`.
pub fn gbm_exact_terminal<T: Scalar>(mu: T, sigma: T, x0: T, t: T, w_t: T) -> Result<T> {
    if !(x0 > T::zero()) {
        return Err(Error::invalid("x0", format!("must be positive, got {x0}")));
    }
    if !(t >= T::zero()) {
        return Err(Error::invalid("t", format!("must be non-negative, got {t}")));
    }
    let half = T::of(0.5);
    Ok(x0 * ((mu - half * sigma * sigma) * t + sigma * w_t).exp())
}

/// Truncated Paley–Wiener series for Brownian motion on `[0, 2π]`:
/// `W(t) ≈ Z0 t/√(2π) + (2/√π) Σ_{n=1..M} Zn sin(n t / 2) / n`.
///
/// `z` holds `Z0..=ZM`, so its length must be `n_terms + 1`.
pub fn paley_wiener_eval<T: Scalar>(t: T, z: &[T], n_terms: usize) -> Result<T> {
    let two_pi = T::TAU();
    if !(t >= T::zero() && t <= two_pi) {
        return Err(Error::invalid("t", format!("must lie in [0, 2π], got {t}")));
    }
    if z.len() != n_terms + 1 {
        return Err(Error::invalid(
            "z",
            format!("expected {} coefficients, got {}", n_terms + 1, z.len()),
        ));
    }
    let half_t = T::of(0.5) * t;
    let series = z[1..].iter().enumerate().fold(T::zero(), |acc, (i, &zn)| {
        let n = T::of_u64(i as u64 + 1);
        acc + zn * (n * half_t).sin() / n
    });
    let linear = z[0] * t / two_pi.sqrt();
    Ok(linear + T::of(2.0) / T::PI().sqrt() * series)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn reference_gbm_coefficients() {
        let m = Gbm::<f64>::reference();
        assert_eq!(m.drift(2.0), 0.1);
        assert_eq!(m.diffusion(2.0), 0.5);
        assert_eq!(m.diffusion_deriv(3.0), Some(0.25));
        assert_eq!(m.x0(), 100.0);
        assert_eq!(m.horizon(), 1.0);
    }

    #[test]
    fn horizon_must_be_positive() {
        assert!(Gbm::new(0.05, 0.25, 100.0, 0.0).is_err());
        assert!(Gbm::new(0.05, 0.25, 100.0, -1.0).is_err());
        assert!(FnModel::new(|x: f64| x, |_| 0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn fn_model_derivative_is_optional() {
        let m = FnModel::new(|x: f64| -x, |x| x * x, 1.0, 1.0).unwrap();
        assert!(!m.has_diffusion_deriv());
        assert_eq!(m.diffusion_deriv(2.0), None);
        let m = m.with_diffusion_deriv(|x| 2.0 * x);
        assert!(m.has_diffusion_deriv());
        assert_eq!(m.diffusion_deriv(2.0), Some(4.0));
        assert_eq!(m.drift(2.0), -2.0);
        assert_eq!(m.diffusion(3.0), 9.0);
    }

    #[test]
    fn exact_gbm_values() {
        // 100·e^0.05 and 100·e^0.01875 from mpmath at 30 digits.
        let det = gbm_exact_terminal(0.05, 0.0, 100.0, 1.0, 3.7).unwrap();
        assert_relative_eq!(det, 105.127_109_637_602_4, max_relative = 1e-14);
        assert_eq!(gbm_exact_terminal(0.3, 0.9, 42.0, 0.0, 0.0).unwrap(), 42.0);
        let zero_w = gbm_exact_terminal(0.05, 0.25, 100.0, 1.0, 0.0).unwrap();
        assert_relative_eq!(zero_w, 101.892_688_505_202_62, max_relative = 1e-14);
        assert!(gbm_exact_terminal(0.05, 0.25, 0.0, 1.0, 0.0).is_err());
        assert!(gbm_exact_terminal(0.05, 0.25, 1.0, -1.0, 0.0).is_err());
    }

    #[test]
    fn paley_wiener_fixed_points() {
        let z = [0.3, -1.2, 0.7, 2.0];
        assert_eq!(paley_wiener_eval(0.0, &z, 3).unwrap(), 0.0);
        let unit = [1.0, 0.0, 0.0];
        let tau = std::f64::consts::TAU;
        assert_relative_eq!(
            paley_wiener_eval(tau, &unit, 2).unwrap(),
            tau.sqrt(),
            max_relative = 1e-15
        );
        assert!(paley_wiener_eval(-0.1, &z, 3).is_err());
        assert!(paley_wiener_eval(tau + 1e-9, &z, 3).is_err());
        assert!(paley_wiener_eval(1.0, &z, 4).is_err());
    }

    #[test]
    fn paley_wiener_in_f32() {
        let z = [0.5f32, 1.0, -0.25];
        let single = paley_wiener_eval(1.5f32, &z, 2).unwrap();
        let double = paley_wiener_eval(1.5f64, &[0.5, 1.0, -0.25], 2).unwrap();
        assert!((f64::from(single) - double).abs() < 1e-6);
    }
}
