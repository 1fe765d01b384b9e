//! Exact Monte Carlo simulation of the telegraph process.
//!
//! Paths are simulated event by event: a fair initial direction, then
//! exponential(λ) holding times between reversals until `τ` is used up. No
//! time grid is involved.
//!
//! Path `i` draws from `ChaCha8Rng::seed_from_u64(seed)` with its stream set
//! to `i`, so every path is reproducible on its own. Paths are grouped in
//! fixed blocks whose partial statistics are merged in block order, so
//! results are bit-identical for any number of threads.

use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{require, Result};
use crate::kernel::TelegraphParams;
use crate::pricer::{MarketParams, OptionSpec};

const BLOCK: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    pub n_paths: u64,
    pub seed: u64,
    /// Pair every displacement `Y` with `-Y`.
    pub antithetic: bool,
}

impl McConfig {
    pub fn new(n_paths: u64, seed: u64) -> Self {
        Self {
            n_paths,
            seed,
            antithetic: false,
        }
    }

    fn validate(&self) -> Result<()> {
        require(self.n_paths >= 1, "n_paths", self.n_paths as f64, ">= 1")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    /// `None` when a single path gives no spread estimate.
    pub std_error: Option<f64>,
    pub n_paths: u64,
    pub seed: u64,
}

/// One draw of `c_m ∫₀^τ (-1)^{N(s)} ds` with a random initial sign.
/// The result always lies in `[-c_m τ, c_m τ]`.
pub fn sample_displacement<R: Rng + ?Sized>(tau: f64, params: &TelegraphParams, rng: &mut R) -> Result<f64> {
    require(tau.is_finite() && tau > 0.0, "tau", tau, "finite and > 0")?;
    let exp = Exp::new(params.lambda()).expect("lambda validated positive");
    Ok(displacement(tau, params.c_m(), &exp, rng))
}

fn displacement<R: Rng + ?Sized>(tau: f64, c_m: f64, exp: &Exp<f64>, rng: &mut R) -> f64 {
    let mut dir = if rng.random::<bool>() { 1.0 } else { -1.0 };
    let mut left = tau;
    let mut pos = 0.0;
    loop {
        let dt: f64 = exp.sample(rng);
        if dt >= left {
            pos += dir * left;
            break;
        }
        pos += dir * dt;
        left -= dt;
        dir = -dir;
    }
    c_m * pos.clamp(-tau, tau)
}

/// `S0·exp(μτ + Y)`, the exact solution of `dS/S = μ dt + c_m (-1)^{N_t} dt`.
pub fn simulate_relativistic_gbm<R: Rng + ?Sized>(
    s0: f64,
    mu: f64,
    tau: f64,
    params: &TelegraphParams,
    rng: &mut R,
) -> Result<f64> {
    require(s0.is_finite() && s0 > 0.0, "s0", s0, "finite and > 0")?;
    require(mu.is_finite(), "mu", mu, "finite")?;
    let y = sample_displacement(tau, params, rng)?;
    Ok(s0 * (mu * tau + y).exp())
}

#[derive(Clone, Copy)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    const EMPTY: Self = Self {
        n: 0,
        mean: 0.0,
        m2: 0.0,
    };

    fn push(&mut self, v: f64) {
        self.n += 1;
        let d = v - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (v - self.mean);
    }

    fn merge(self, o: Self) -> Self {
        if self.n == 0 {
            return o;
        }
        if o.n == 0 {
            return self;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        let (na, nb) = (self.n as f64, o.n as f64);
        Self {
            n,
            mean: self.mean + d * nb / n as f64,
            m2: self.m2 + o.m2 + d * d * na * nb / n as f64,
        }
    }
}

/// Monte Carlo estimate of `E[g(Y)]` with `Y` the displacement at `τ`.
pub fn mc_expectation<G>(tau: f64, params: &TelegraphParams, cfg: &McConfig, g: G) -> Result<McEstimate>
where
    G: Fn(f64) -> f64 + Sync,
{
    require(tau.is_finite() && tau > 0.0, "tau", tau, "finite and > 0")?;
    cfg.validate()?;
    let exp = Exp::new(params.lambda()).expect("lambda validated positive");
    let c_m = params.c_m();
    let base = ChaCha8Rng::seed_from_u64(cfg.seed);
    let blocks = cfg.n_paths.div_ceil(BLOCK);

    let parts: Vec<Moments> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut acc = Moments::EMPTY;
            let end = ((b + 1) * BLOCK).min(cfg.n_paths);
            for i in b * BLOCK..end {
                let mut rng = base.clone();
                rng.set_stream(i);
                rng.set_word_pos(0);
                let y = displacement(tau, c_m, &exp, &mut rng);
                let v = if cfg.antithetic {
                    0.5 * (g(y) + g(-y))
                } else {
                    g(y)
                };
                acc.push(v);
            }
            acc
        })
        .collect();
    let total = parts.into_iter().fold(Moments::EMPTY, Moments::merge);

    let std_error = (total.n > 1).then(|| (total.m2 / (total.n - 1) as f64 / total.n as f64).sqrt());
    Ok(McEstimate {
        mean: total.mean,
        std_error,
        n_paths: total.n,
        seed: cfg.seed,
    })
}

/// Discounted expected payoff of `S·e^{(r - σ²/2)τ + Y}` with `λ = c_m²/σ²`.
pub fn mc_price(market: &MarketParams, option: &OptionSpec, c_m: f64, cfg: &McConfig) -> Result<McEstimate> {
    market.validate()?;
    option.validate()?;
    let params = TelegraphParams::from_sigma(c_m, market.sigma)?;
    let fwd = market.spot * market.drift().exp();
    let df = market.discount();
    mc_expectation(market.tau, &params, cfg, |y| df * option.payoff(fwd * y.exp()))
}
