//! Black-Scholes implied volatility and its first-order telegraph estimate.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{require, Error, Result};
use crate::pricer::{bs_unchecked, v_unchecked, MarketParams, OptionKind, OptionSpec};
use crate::root::brent;

/// Lower end of the volatility search interval.
pub const SIGMA_MIN: f64 = 1e-6;
/// Upper end of the volatility search interval.
pub const SIGMA_MAX: f64 = 5.0;
/// Price residual tolerance relative to spot.
pub const RESIDUAL_TOL: f64 = 1e-9;
pub const MAX_ITERATIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IvResult {
    pub sigma_implied: f64,
    pub iterations: usize,
    pub achieved_residual: f64,
}

/// Solves `bs_price(σ) = price` for `σ ∈ [SIGMA_MIN, SIGMA_MAX]`. The
/// volatility stored in `market` is ignored.
///
/// `Ok(None)` means no volatility reproduces the price: it is at or below
/// the `σ → 0` limit `max(0, ±(S - K e^{-rτ}))`, above the price at
/// `SIGMA_MAX`, or its root lies below `SIGMA_MIN`.
pub fn invert_bs(price: f64, market: &MarketParams, option: &OptionSpec) -> Result<Option<IvResult>> {
    require(price.is_finite(), "price", price, "finite")?;
    market.validate()?;
    option.validate()?;
    let s0 = market.spot;
    let fwd_intrinsic = s0 - option.strike * market.discount();
    let intrinsic = match option.kind {
        OptionKind::Call => fwd_intrinsic.max(0.0),
        OptionKind::Put => (-fwd_intrinsic).max(0.0),
    };
    if price <= intrinsic {
        return Ok(None);
    }
    let residual = |s: f64| bs_unchecked(&market.with_sigma(s), option) - price;
    let hi = residual(SIGMA_MAX);
    let lo = residual(SIGMA_MIN);
    if hi < 0.0 || lo > 0.0 {
        return Ok(None);
    }
    let tol = RESIDUAL_TOL * s0;
    // Tiny prices get a proportionally tight target so the solver does not
    // stop at an arbitrary σ whose price happens to be below tol.
    let ftol = tol.min(RESIDUAL_TOL * price);
    let root = brent(residual, SIGMA_MIN, SIGMA_MAX, ftol, MAX_ITERATIONS)?;
    if root.fx.abs() > tol {
        return Err(Error::IllConditioned("implied volatility residual above tolerance"));
    }
    Ok(Some(IvResult {
        sigma_implied: root.x,
        iterations: root.iterations,
        achieved_residual: root.fx.abs(),
    }))
}

/// `v̄ = [S(σ²τ - x)e^{-d1²/2} + K x e^{-rτ - d2²/2}] / (σ√(2πτ))`, the
/// derivative of the Black-Scholes price along `σ → σ(1 + s)` at `s = 0`.
pub fn vega_bar(market: &MarketParams, strike: f64) -> Result<f64> {
    market.validate()?;
    require(strike.is_finite() && strike > 0.0, "strike", strike, "finite and > 0")?;
    Ok(vega_bar_unchecked(market, strike))
}

fn vega_bar_unchecked(market: &MarketParams, strike: f64) -> f64 {
    let (sig, tau, s0) = (market.sigma, market.tau, market.spot);
    let x = (s0 / strike).ln() + market.drift();
    let st = sig * tau.sqrt();
    let d1 = (st * st + x) / st;
    let d2 = x / st;
    (s0 * (sig * sig * tau - x) * (-0.5 * d1 * d1).exp()
        + strike * x * (-market.rate * tau - 0.5 * d2 * d2).exp())
        / (sig * (2.0 * PI * tau).sqrt())
}

/// `σ_I = σ(1 + v/(c_m² v̄))`, the implied volatility of the corrected price
/// to first order in `1/c_m²`.
pub fn first_order_iv(market: &MarketParams, strike: f64, c_m: f64) -> Result<f64> {
    market.validate()?;
    require(strike.is_finite() && strike > 0.0, "strike", strike, "finite and > 0")?;
    require(c_m.is_finite() && c_m > 0.0, "c_m", c_m, "finite and > 0")?;
    let vb = vega_bar_unchecked(market, strike);
    if vb.is_nan() || vb.abs() < 1e-12 * market.spot {
        return Err(Error::IllConditioned("vega_bar vanishes"));
    }
    let v = v_unchecked(market, strike);
    Ok(market.sigma * (1.0 + v / (c_m * c_m * vb)))
}
