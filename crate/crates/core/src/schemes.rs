//! Time stepping and the coupled coarse/fine path pair behind every level
//! correction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::{scale_increment, IncrementPath, NoiseStream};
use crate::scalar::Scalar;
use crate::sde::SdeModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeKind {
    EulerMaruyama,
    /// Scalar Milstein; needs the model's diffusion derivative.
    Milstein,
}

impl SchemeKind {
    pub fn check_admissible<T: Scalar, S: SdeModel<T> + ?Sized>(self, model: &S) -> Result<()> {
        match self {
            SchemeKind::Milstein if !model.has_diffusion_deriv() => Err(Error::MilsteinUnavailable),
            _ => Ok(()),
        }
    }
}

/// Terminal values of a fine path and its coarsening on one Brownian path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoupledTerminal<T> {
    pub fine: T,
    pub coarse: T,
    /// Fine plus coarse integration steps.
    pub cost: u64,
}

/// `Δt_l = T / M^l`.
pub fn level_stepsize<T: Scalar>(level: u32, refinement_factor: u32, horizon: T) -> T {
    horizon / T::of_u64(u64::from(refinement_factor)).powi(level as i32)
}

/// Number of steps `M^l` at `level`.
pub fn level_steps(level: u32, refinement_factor: u32) -> Result<u64> {
    u64::from(refinement_factor)
        .checked_pow(level)
        .ok_or_else(|| Error::invalid("level", format!("M^{level} overflows the step counter")))
}

pub(crate) fn check_refinement(refinement_factor: u32) -> Result<()> {
    if refinement_factor < 2 {
        Err(Error::invalid("refinement_factor", format!("must be >= 2, got {refinement_factor}")))
    } else {
        Ok(())
    }
}

/// Stateful single-step advance. `dt` and `dw` fully describe the step.
#[inline(always)]
fn advance<T: Scalar, S: SdeModel<T> + ?Sized>(
    model: &S,
    scheme: SchemeKind,
    x: T,
    dt: T,
    dw: T,
) -> T {
    let euler = x + model.drift(x) * dt + model.diffusion(x) * dw;
    match scheme {
        SchemeKind::EulerMaruyama => euler,
        SchemeKind::Milstein => {
            let g = model.diffusion(x);
            let g_prime = model.diffusion_deriv(x).unwrap_or_else(T::zero);
            euler + T::of(0.5) * g * g_prime * (dw * dw - dt)
        }
    }
}

/// Steps `model.x0()` through every increment and returns the final state.
pub fn integrate_terminal<T: Scalar, S: SdeModel<T> + ?Sized>(
    model: &S,
    scheme: SchemeKind,
    increments: &IncrementPath<T>,
) -> Result<T> {
    scheme.check_admissible(model)?;
    let span = increments.span();
    let horizon = model.horizon();
    let tol = T::epsilon() * T::of(4.0) * T::of_u64(increments.len().max(1) as u64) * horizon;
    if increments.is_empty() || (span - horizon).abs() > tol {
        return Err(Error::HorizonMismatch { span: span.as_f64(), horizon: horizon.as_f64() });
    }
    let dt = increments.dt;
    let mut x = model.x0();
    for (step, &dw) in increments.values.iter().enumerate() {
        x = advance(model, scheme, x, dt, dw);
        if !x.is_finite() {
            return Err(Error::NonFinite { step });
        }
    }
    Ok(x)
}

/// Terminal value of a single path at `level`, with increments drawn on the fly.
pub fn level_terminal<T: Scalar, S: SdeModel<T> + ?Sized>(
    model: &S,
    scheme: SchemeKind,
    level: u32,
    refinement_factor: u32,
    stream: &NoiseStream,
) -> Result<T> {
    scheme.check_admissible(model)?;
    check_refinement(refinement_factor)?;
    let n_steps = level_steps(level, refinement_factor)?;
    let dt = level_stepsize(level, refinement_factor, model.horizon());
    let sqrt_dt = dt.sqrt();
    let mut normals = stream.normals();
    let mut x = model.x0();
    for step in 0..n_steps as usize {
        let dw = scale_increment(sqrt_dt, normals.next_normal());
        x = advance(model, scheme, x, dt, dw);
        if !x.is_finite() {
            return Err(Error::NonFinite { step });
        }
    }
    Ok(x)
}

/// Integrates the level-`l` path and its level-`(l-1)` coarsening, both driven
/// by the same Brownian increments drawn from `stream`.
///
/// The coarse increments are left-to-right sums of `M` fine increments and the
/// coarse step is `M · Δt_l`, so `coarse` agrees bitwise with
/// [`integrate_terminal`] applied to [`crate::coarsen_increments`] of the
/// fine path.
pub fn coupled_terminal<T: Scalar, S: SdeModel<T> + ?Sized>(
    model: &S,
    scheme: SchemeKind,
    level: u32,
    refinement_factor: u32,
    stream: &NoiseStream,
) -> Result<CoupledTerminal<T>> {
    scheme.check_admissible(model)?;
    check_refinement(refinement_factor)?;
    if level == 0 {
        return Err(Error::invalid("level", "coupled pairs need level >= 1"));
    }
    let n_fine = level_steps(level, refinement_factor)?;
    let m = refinement_factor as usize;
    let n_coarse = (n_fine / u64::from(refinement_factor)) as usize;
    let dt_fine = level_stepsize(level, refinement_factor, model.horizon());
    let dt_coarse = dt_fine * T::of_u64(u64::from(refinement_factor));
    let sqrt_dt = dt_fine.sqrt();

    let mut normals = stream.normals();
    let mut fine = model.x0();
    let mut coarse = model.x0();
    for coarse_step in 0..n_coarse {
        let mut dw_coarse = T::zero();
        for sub in 0..m {
            let dw = scale_increment(sqrt_dt, normals.next_normal());
            dw_coarse = dw_coarse + dw;
            fine = advance(model, scheme, fine, dt_fine, dw);
            if !fine.is_finite() {
                return Err(Error::NonFinite { step: coarse_step * m + sub });
            }
        }
        coarse = advance(model, scheme, coarse, dt_coarse, dw_coarse);
        if !coarse.is_finite() {
            return Err(Error::NonFinite { step: coarse_step });
        }
    }
    Ok(CoupledTerminal { fine, coarse, cost: n_fine + n_coarse as u64 })
}
