//! Discounted European payoffs on the terminal asset value.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PayoffKind {
    Call,
    Put,
    /// Pays `cash` above the strike, nothing below, and half of `cash` at the
    /// strike itself.
    DigitalCall,
}

/// A payoff together with its discounting, `h(x) = e^{-rT} · payout(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PayoffSpec<T> {
    kind: PayoffKind,
    strike: T,
    rate: T,
    horizon: T,
    cash: T,
    #[serde(skip)]
    discount: T,
}

impl<T: Scalar> PayoffSpec<T> {
    pub fn new(kind: PayoffKind, strike: T, rate: T, horizon: T, cash: T) -> Result<Self> {
        if !(strike > T::zero()) || !strike.is_finite() {
            return Err(Error::invalid("strike", format!("must be positive, got {strike}")));
        }
        if !(horizon > T::zero()) || !horizon.is_finite() {
            return Err(Error::invalid("horizon", format!("must be positive, got {horizon}")));
        }
        if !rate.is_finite() || !cash.is_finite() {
            return Err(Error::invalid("payoff", "rate and cash must be finite"));
        }
        let discount = (-rate * horizon).exp();
        Ok(Self { kind, strike, rate, horizon, cash, discount })
    }

    /// Call or put with the default digital cash amount of 100.
    pub fn vanilla(kind: PayoffKind, strike: T, rate: T, horizon: T) -> Result<Self> {
        Self::new(kind, strike, rate, horizon, T::of(100.0))
    }

    /// `kind` with `E = 100`, `r = 0.05`, `T = 1`, `cash = 100`.
    pub fn reference(kind: PayoffKind) -> Self {
        Self::new(kind, T::of(100.0), T::of(0.05), T::one(), T::of(100.0))
            .expect("reference payoff parameters are valid")
    }

    pub fn kind(&self) -> PayoffKind {
        self.kind
    }

    pub fn strike(&self) -> T {
        self.strike
    }

    pub fn rate(&self) -> T {
        self.rate
    }

    pub fn horizon(&self) -> T {
        self.horizon
    }

    pub fn cash(&self) -> T {
        self.cash
    }

    /// `e^{-rT}`.
    pub fn discount(&self) -> T {
        self.discount
    }

    #[inline]
    pub fn evaluate(&self, terminal: T) -> Result<T> {
        if !terminal.is_finite() {
            return Err(Error::NonFiniteTerminal);
        }
        let payout = match self.kind {
            PayoffKind::Call => (terminal - self.strike).max(T::zero()),
            PayoffKind::Put => (self.strike - terminal).max(T::zero()),
            PayoffKind::DigitalCall => {
                if terminal > self.strike {
                    self.cash
                } else if terminal < self.strike {
                    T::zero()
                } else {
                    self.cash * T::of(0.5)
                }
            }
        };
        Ok(self.discount * payout)
    }
}
