//! Closed-form Black–Scholes values used as ground truth.
//!
//! Independent of the simulation code: these work in `f64` and take the
//! normal CDF from `libm::erfc` (FreeBSD msun port, error below 1 ulp in the
//! range used here), `Φ(x) = erfc(−x/√2)/2`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BsParams {
    pub spot: f64,
    pub strike: f64,
    pub rate: f64,
    pub volatility: f64,
    pub horizon: f64,
}

impl BsParams {
    pub fn new(spot: f64, strike: f64, rate: f64, volatility: f64, horizon: f64) -> Result<Self> {
        let p = Self { spot, strike, rate, volatility, horizon };
        p.validate()?;
        Ok(p)
    }

    /// `S0 = 100`, `E = 100`, `r = 0.05`, `σ = 0.25`, `T = 1`.
    pub fn reference() -> Self {
        Self { spot: 100.0, strike: 100.0, rate: 0.05, volatility: 0.25, horizon: 1.0 }
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("spot", self.spot),
            ("strike", self.strike),
            ("volatility", self.volatility),
            ("horizon", self.horizon),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::invalid(name, format!("must be positive and finite, got {v}")));
            }
        }
        if !self.rate.is_finite() {
            return Err(Error::invalid("rate", "must be finite"));
        }
        Ok(())
    }

    fn d1_d2(&self) -> (f64, f64) {
        let vol_sqrt_t = self.volatility * self.horizon.sqrt();
        let d1 = ((self.spot / self.strike).ln()
            + (self.rate + 0.5 * self.volatility * self.volatility) * self.horizon)
            / vol_sqrt_t;
        (d1, d1 - vol_sqrt_t)
    }

    fn discount(&self) -> f64 {
        (-self.rate * self.horizon).exp()
    }
}

/// Standard normal CDF.
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

pub fn black_scholes_call(p: &BsParams) -> Result<f64> {
    p.validate()?;
    let (d1, d2) = p.d1_d2();
    Ok(p.spot * norm_cdf(d1) - p.strike * p.discount() * norm_cdf(d2))
}

pub fn black_scholes_put(p: &BsParams) -> Result<f64> {
    p.validate()?;
    let (d1, d2) = p.d1_d2();
    Ok(p.strike * p.discount() * norm_cdf(-d2) - p.spot * norm_cdf(-d1))
}

/// Cash-or-nothing call paying `cash` when `S_T > E`.
pub fn black_scholes_digital(p: &BsParams, cash: f64) -> Result<f64> {
    p.validate()?;
    if !(cash > 0.0) || !cash.is_finite() {
        return Err(Error::invalid("cash", format!("must be positive, got {cash}")));
    }
    let (_, d2) = p.d1_d2();
    Ok(cash * p.discount() * norm_cdf(d2))
}
