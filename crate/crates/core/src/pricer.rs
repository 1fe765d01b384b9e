//! European vanilla option prices.
//!
//! Prices are expressed in the moneyness coordinate
//! `x = ln(S/K) + (r - σ²/2)τ`. Under the telegraph model the terminal spot is
//! `S' = S·e^{(r-σ²/2)τ - Y}` where `Y` has the telegraph law at time `τ` with
//! `λ = c_m²/σ²`, and the price is the discounted expected payoff.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{require, Error, Result};
use crate::kernel::{self, f_unchecked, TelegraphParams};
use crate::quad::{self, Integral, QuadConfig};
use crate::special_fn::{m_func, ncdf};

/// Market state shared by every pricing routine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarketParams {
    pub spot: f64,
    pub rate: f64,
    pub sigma: f64,
    pub tau: f64,
}

impl MarketParams {
    pub fn new(spot: f64, rate: f64, sigma: f64, tau: f64) -> Result<Self> {
        let m = Self {
            spot,
            rate,
            sigma,
            tau,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        require(self.spot.is_finite() && self.spot > 0.0, "spot", self.spot, "finite and > 0")?;
        require(self.rate.is_finite(), "rate", self.rate, "finite")?;
        require(self.sigma.is_finite() && self.sigma > 0.0, "sigma", self.sigma, "finite and > 0")?;
        require(self.tau.is_finite() && self.tau > 0.0, "tau", self.tau, "finite and > 0")
    }

    pub fn with_sigma(&self, sigma: f64) -> Self {
        Self { sigma, ..*self }
    }

    pub fn discount(&self) -> f64 {
        (-self.rate * self.tau).exp()
    }

    /// `(r - σ²/2)τ`.
    pub fn drift(&self) -> f64 {
        (self.rate - 0.5 * self.sigma * self.sigma) * self.tau
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptionKind {
    Call,
    Put,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptionSpec {
    pub kind: OptionKind,
    pub strike: f64,
}

impl OptionSpec {
    pub fn new(kind: OptionKind, strike: f64) -> Result<Self> {
        let o = Self { kind, strike };
        o.validate()?;
        Ok(o)
    }

    pub fn call(strike: f64) -> Self {
        Self {
            kind: OptionKind::Call,
            strike,
        }
    }

    pub fn put(strike: f64) -> Self {
        Self {
            kind: OptionKind::Put,
            strike,
        }
    }

    pub fn validate(&self) -> Result<()> {
        require(
            self.strike.is_finite() && self.strike > 0.0,
            "strike",
            self.strike,
            "finite and > 0",
        )
    }

    pub fn payoff(&self, terminal: f64) -> f64 {
        match self.kind {
            OptionKind::Call => (terminal - self.strike).max(0.0),
            OptionKind::Put => (self.strike - terminal).max(0.0),
        }
    }
}

/// Telegraph price split into its light-cone atom and continuous parts.
/// All amounts are discounted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriceBreakdown {
    pub atom_contribution: f64,
    pub continuous_contribution: f64,
    pub total: f64,
    pub quad_error: f64,
}

fn check(market: &MarketParams, option: &OptionSpec) -> Result<()> {
    market.validate()?;
    option.validate()
}

/// `ln(S/K) + (r - σ²/2)τ`.
pub fn log_moneyness(market: &MarketParams, strike: f64) -> Result<f64> {
    market.validate()?;
    require(strike.is_finite() && strike > 0.0, "strike", strike, "finite and > 0")?;
    Ok((market.spot / strike).ln() + market.drift())
}

fn d12(market: &MarketParams, strike: f64) -> (f64, f64, f64) {
    let x = (market.spot / strike).ln() + market.drift();
    let s = market.sigma * market.tau.sqrt();
    (x, (s * s + x) / s, x / s)
}

/// Black-Scholes price. Puts come from put-call parity.
pub fn bs_price(market: &MarketParams, option: &OptionSpec) -> Result<f64> {
    check(market, option)?;
    Ok(bs_unchecked(market, option))
}

pub(crate) fn bs_unchecked(market: &MarketParams, option: &OptionSpec) -> f64 {
    let (_, d1, d2) = d12(market, option.strike);
    let kd = option.strike * market.discount();
    let call = market.spot * ncdf(d1) - kd * ncdf(d2);
    match option.kind {
        OptionKind::Call => call,
        OptionKind::Put => call - market.spot + kd,
    }
}

/// Price under the telegraph law, integrating the payoff against the
/// continuous density and adding both light-cone atoms at full weight.
/// Puts are integrated directly so parity violations stay visible.
pub fn telegraph_price(
    market: &MarketParams,
    option: &OptionSpec,
    c_m: f64,
    cfg: &QuadConfig,
) -> Result<PriceBreakdown> {
    check(market, option)?;
    let params = TelegraphParams::from_sigma(c_m, market.sigma)?;
    let tau = market.tau;
    let fwd = market.spot * market.drift().exp();
    let payoff = |y: f64| option.payoff(fwd * (-y).exp());

    let x = (market.spot / option.strike).ln() + market.drift();
    let cont = kernel::integrate_continuous(tau, &params, payoff, &[x], cfg)?;

    let w = kernel::atom_weight(tau, &params)?;
    let ct = c_m * tau;
    // A vanishing atom must not meet an overflowing payoff.
    let atoms = if w > 0.0 {
        w * (payoff(ct) + payoff(-ct))
    } else {
        0.0
    };

    let df = market.discount();
    let atom_contribution = df * atoms;
    let continuous_contribution = df * cont.value;
    let total = atom_contribution + continuous_contribution;
    if !total.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(PriceBreakdown {
        atom_contribution,
        continuous_contribution,
        total,
        quad_error: df * cont.error,
    })
}

/// `E[S']` under the telegraph law, by quadrature plus atoms. Undiscounted.
pub fn first_moment(market: &MarketParams, c_m: f64, cfg: &QuadConfig) -> Result<Integral> {
    market.validate()?;
    let params = TelegraphParams::from_sigma(c_m, market.sigma)?;
    let fwd = market.spot * market.drift().exp();
    let ct = c_m * market.tau;
    let cont = kernel::integrate_continuous(market.tau, &params, |y| fwd * (-y).exp(), &[], cfg)?;
    let w = kernel::atom_weight(market.tau, &params)?;
    let atoms = if w > 0.0 {
        w * fwd * ((-ct).exp() + ct.exp())
    } else {
        0.0
    };
    let value = cont.value + atoms;
    if !value.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(Integral { value, ..cont })
}

/// Positive root of `f(y,τ) = -c_m²`,
/// `sqrt(2σ²τ + στ·sqrt(3σ² + 8c_m²τ))`: the edge of the region where the
/// corrected density factor `1 + f/c_m²` is nonnegative.
pub fn y_max(tau: f64, sigma: f64, c_m: f64) -> Result<f64> {
    require(tau.is_finite() && tau > 0.0, "tau", tau, "finite and > 0")?;
    require(sigma.is_finite() && sigma > 0.0, "sigma", sigma, "finite and > 0")?;
    require(c_m.is_finite() && c_m > 0.0, "c_m", c_m, "finite and > 0")?;
    let s2 = sigma * sigma;
    Ok((2.0 * s2 * tau + sigma * tau * (3.0 * s2 + 8.0 * c_m * c_m * tau).sqrt()).sqrt())
}

/// Call price from the density `N(0, σ²τ)·(1 + f/c_m²)`, integrated where the
/// correction factor is nonnegative. Calls only.
pub fn truncated_expansion_price(market: &MarketParams, option: &OptionSpec, c_m: f64) -> Result<f64> {
    check(market, option)?;
    if option.kind != OptionKind::Call {
        return Err(Error::Input(
            "truncated expansion price is defined for calls only".into(),
        ));
    }
    let (sigma, tau) = (market.sigma, market.tau);
    let ym = y_max(tau, sigma, c_m)?;
    let x = (market.spot / option.strike).ln() + market.drift();
    let var = sigma * sigma * tau;
    let c2 = c_m * c_m;
    let integrand = |y: f64| {
        let u = x - y;
        let g = (-u * u / (2.0 * var)).exp() * (1.0 + f_unchecked(u, tau, sigma) / c2);
        if g == 0.0 {
            0.0
        } else {
            y.exp_m1() * g
        }
    };
    let lo = (x - ym).max(0.0);
    let hi = x + ym;
    if hi <= lo {
        return Ok(0.0);
    }
    let sd = var.sqrt();
    let mut pts = vec![lo, hi];
    for k in [-16.0, -8.0, -4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 8.0, 16.0] {
        let p = x + k * sd;
        if p > lo && p < hi {
            pts.push(p);
        }
    }
    let cfg = QuadConfig {
        rel_tol: 1e-12,
        abs_tol: 1e-15,
        ..QuadConfig::default()
    };
    let integral = quad::integrate(integrand, &pts, &cfg)?;
    Ok(option.strike * market.discount() / (2.0 * PI * var).sqrt() * integral.value)
}

/// Closed-form coefficient `v` of `1/c_m²` in the call price:
///
/// ```text
/// v = -S(σ⁴/4 + σ⁶τ/8)·N(d1)
///     - Sσ³/(8√(2πτ)) · e^{-d1²/2} · (1 + d1² - 3d1·σ√τ + 3σ²τ)
/// ```
pub fn correction_v(market: &MarketParams, strike: f64) -> Result<f64> {
    market.validate()?;
    require(strike.is_finite() && strike > 0.0, "strike", strike, "finite and > 0")?;
    Ok(v_unchecked(market, strike))
}

pub(crate) fn v_unchecked(market: &MarketParams, strike: f64) -> f64 {
    let (sig, tau, s0) = (market.sigma, market.tau, market.spot);
    let (_, d1, _) = d12(market, strike);
    let st = sig * tau.sqrt();
    let s2 = sig * sig;
    -s0 * (s2 * s2 / 4.0 + s2 * s2 * s2 * tau / 8.0) * ncdf(d1)
        - s0 * sig.powi(3) / (8.0 * (2.0 * PI * tau).sqrt())
            * (-0.5 * d1 * d1).exp()
            * (1.0 + d1 * d1 - 3.0 * d1 * st + 3.0 * s2 * tau)
}

/// Alternative closed form of the correction written with
/// `M(z) = N(z) z² (z² + 2)`:
///
/// ```text
/// -σ²/(8τ)·[S·M(d1) - K e^{-rτ} M(d2)]
///     - Sσ²/(8√(2πτ)) · e^{-d1²/2} · (1 + 1.5d1² + 1.5d2² - σ²τ/2)
/// ```
///
/// It does not reproduce the `1/c_m²` coefficient of the telegraph price and
/// is kept for comparison only.
pub fn m_form_correction(market: &MarketParams, strike: f64) -> Result<f64> {
    market.validate()?;
    require(strike.is_finite() && strike > 0.0, "strike", strike, "finite and > 0")?;
    let (sig, tau, s0) = (market.sigma, market.tau, market.spot);
    let (_, d1, d2) = d12(market, strike);
    let kd = strike * market.discount();
    Ok(-sig * sig / (8.0 * tau) * (s0 * m_func(d1)? - kd * m_func(d2)?)
        - s0 * sig * sig / (8.0 * (2.0 * PI * tau).sqrt())
            * (-0.5 * d1 * d1).exp()
            * (1.0 + 1.5 * d1 * d1 + 1.5 * d2 * d2 - 0.5 * sig * sig * tau))
}

/// Black-Scholes price plus `v/c_m²`. A put is obtained from the corrected
/// call by put-call parity.
pub fn corrected_price(market: &MarketParams, option: &OptionSpec, c_m: f64) -> Result<f64> {
    check(market, option)?;
    require(c_m.is_finite() && c_m > 0.0, "c_m", c_m, "finite and > 0")?;
    let call = bs_unchecked(market, &OptionSpec::call(option.strike))
        + v_unchecked(market, option.strike) / (c_m * c_m);
    Ok(match option.kind {
        OptionKind::Call => call,
        OptionKind::Put => call - market.spot + option.strike * market.discount(),
    })
}

/// Telegraph call minus telegraph put minus `S - K e^{-rτ}`.
pub fn parity_gap(market: &MarketParams, c_m: f64, strike: f64, cfg: &QuadConfig) -> Result<f64> {
    let call = telegraph_price(market, &OptionSpec::call(strike), c_m, cfg)?;
    let put = telegraph_price(market, &OptionSpec::put(strike), c_m, cfg)?;
    Ok(call.total - put.total - (market.spot - strike * market.discount()))
}
