//! The telegraph transition density.
//!
//! A particle moving at speed `c_m` whose direction flips at the events of a
//! Poisson process with rate `λ`, started at the origin with a fair random
//! direction, has at time `t` the law
//!
//! ```text
//! p(x,t) = e^{-λt}/2 · [δ(x - c_m t) + δ(x + c_m t)]
//!        + e^{-λt} λ/(2c_m) · [I0(z) + λt · I1(z)/z]      for |x| < c_m t
//! z      = (λ/c_m) · sqrt(c_m² t² - x²)
//! ```
//!
//! The continuous part is evaluated as `e^{z-λt}` times scaled Bessel values;
//! `z - λt = -λx²/(c_m(c_m t + sqrt(c_m²t² - x²)))` is formed without
//! cancellation and is never positive, so nothing overflows for any `λt`.
//! Inside the light cone the continuous part is an entire function of `x²`;
//! its only irregularity is the jump to zero at `|x| = c_m t`.

use serde::{Deserialize, Serialize};

use crate::error::{require, Error, Result};
use crate::quad::{self, Integral, QuadConfig};
use crate::special_fn::{erfi, i0e, i1e_over_z};

/// Maximal log-speed `c_m` and switching rate `λ` of the telegraph process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TelegraphParams {
    c_m: f64,
    lambda: f64,
}

impl TelegraphParams {
    pub fn new(c_m: f64, lambda: f64) -> Result<Self> {
        require(c_m.is_finite() && c_m > 0.0, "c_m", c_m, "finite and > 0")?;
        require(
            lambda.is_finite() && lambda > 0.0,
            "lambda",
            lambda,
            "finite and > 0",
        )?;
        let sigma = c_m / lambda.sqrt();
        require(
            sigma.is_finite() && sigma > 0.0,
            "sigma",
            sigma,
            "c_m/sqrt(lambda) finite and > 0",
        )?;
        Ok(Self { c_m, lambda })
    }

    /// Calibrates `λ = c_m²/σ²` so the diffusive limit has volatility `σ`.
    pub fn from_sigma(c_m: f64, sigma: f64) -> Result<Self> {
        require(sigma.is_finite() && sigma > 0.0, "sigma", sigma, "finite and > 0")?;
        Self::new(c_m, (c_m / sigma).powi(2))
    }

    pub fn c_m(&self) -> f64 {
        self.c_m
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Diffusion volatility `c_m/√λ`.
    pub fn sigma(&self) -> f64 {
        self.c_m / self.lambda.sqrt()
    }
}

/// The density at one point together with the light-cone atoms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityEvaluation {
    pub continuous: f64,
    /// Mass at each of `x = ±c_m t`.
    pub atom_weight: f64,
    pub support_half_width: f64,
}

fn check_time(t: f64, strict: bool) -> Result<()> {
    if strict {
        require(t.is_finite() && t > 0.0, "t", t, "finite and > 0")
    } else {
        require(t.is_finite() && t >= 0.0, "t", t, "finite and >= 0")
    }
}

// Unchecked continuous density; t > 0.
#[inline]
pub(crate) fn p_cont(x: f64, t: f64, params: &TelegraphParams) -> f64 {
    let (c, lam) = (params.c_m, params.lambda);
    let ct = c * t;
    let ax = x.abs();
    if ax >= ct || ax.is_nan() {
        return 0.0;
    }
    let rt = ((ct - ax) * (ct + ax)).sqrt();
    let z = lam * rt / c;
    let expo = -lam * ax * ax / (c * (ct + rt));
    expo.exp() * lam / (2.0 * c) * (i0e(z) + lam * t * i1e_over_z(z))
}

/// Absolutely continuous part of the density at `(x, t)`; zero for
/// `|x| ≥ c_m t`.
pub fn density_continuous(x: f64, t: f64, params: &TelegraphParams) -> Result<f64> {
    check_time(t, true)?;
    require(x.is_finite(), "x", x, "finite")?;
    Ok(p_cont(x, t, params))
}

/// Mass `e^{-λt}/2` sitting at each end of the light cone.
pub fn atom_weight(t: f64, params: &TelegraphParams) -> Result<f64> {
    check_time(t, false)?;
    Ok(0.5 * (-params.lambda * t).exp())
}

pub fn evaluate(x: f64, t: f64, params: &TelegraphParams) -> Result<DensityEvaluation> {
    Ok(DensityEvaluation {
        continuous: density_continuous(x, t, params)?,
        atom_weight: atom_weight(t, params)?,
        support_half_width: params.c_m * t,
    })
}

/// `Var X(t) = c_m²/2 · [2t/λ - (1 - e^{-2λt})/λ²]`.
pub fn variance(t: f64, params: &TelegraphParams) -> Result<f64> {
    check_time(t, false)?;
    let u = params.lambda * t;
    // g(u) = e^{-2u} - 1 + 2u, by series where the direct form cancels.
    let g = if u < 0.1 {
        let mut term = 1.0;
        let mut sum = 0.0;
        for n in 1..=20 {
            term *= -2.0 * u / n as f64;
            if n >= 2 {
                sum += term;
            }
        }
        sum
    } else {
        (-2.0 * u).exp_m1() + 2.0 * u
    };
    Ok(params.c_m.powi(2) * g / (2.0 * params.lambda.powi(2)))
}

/// Initial quadrature breakpoints for integrals against the density at time
/// `t`: the light-cone ends, the origin and multiples of the standard
/// deviation out to the cone.
pub(crate) fn breakpoints(t: f64, params: &TelegraphParams) -> Vec<f64> {
    const MULTIPLES: [f64; 14] = [
        0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0, 24.0, 32.0, 48.0, 64.0,
    ];
    let ct = params.c_m * t;
    let sd = variance(t, params).unwrap_or(0.0).sqrt();
    let mut pts = vec![-ct, 0.0, ct];
    for k in MULTIPLES {
        let y = k * sd;
        if y < ct {
            pts.push(y);
            pts.push(-y);
        }
    }
    pts
}

/// `∫ p_cont(y, t) g(y) dy` over the open light cone. `kinks` are extra
/// breakpoints where `g` is not smooth; those outside the cone are ignored.
pub fn integrate_continuous<G: Fn(f64) -> f64>(
    t: f64,
    params: &TelegraphParams,
    g: G,
    kinks: &[f64],
    cfg: &QuadConfig,
) -> Result<Integral> {
    check_time(t, true)?;
    let ct = params.c_m * t;
    let mut pts = breakpoints(t, params);
    pts.extend(kinks.iter().copied().filter(|k| k.abs() < ct));
    quad::integrate(
        |y| {
            // Keep a vanishing density from meeting an overflowing g.
            let p = p_cont(y, t, params);
            if p == 0.0 {
                0.0
            } else {
                p * g(y)
            }
        },
        &pts,
        cfg,
    )
}

/// `f(x,τ) = -σ²/(8τ) + x²/(2τ²) - x⁴/(8σ²τ³)`, the `1/c_m²` coefficient of
/// the density relative to the Gaussian.
pub fn expansion_f(x: f64, tau: f64, sigma: f64) -> Result<f64> {
    require(tau.is_finite() && tau > 0.0, "tau", tau, "finite and > 0")?;
    require(sigma.is_finite() && sigma > 0.0, "sigma", sigma, "finite and > 0")?;
    Ok(f_unchecked(x, tau, sigma))
}

#[inline]
pub(crate) fn f_unchecked(x: f64, tau: f64, sigma: f64) -> f64 {
    let s2 = sigma * sigma;
    let x2 = x * x;
    -s2 / (8.0 * tau) + x2 / (2.0 * tau * tau) - x2 * x2 / (8.0 * s2 * tau.powi(3))
}

/// Gaussian density of variance `σ²τ` times `1 + f(x,τ)/c_m²`. Not clipped:
/// the truncated expansion goes negative far in the tails.
pub fn gaussian_expansion_pdf(x: f64, tau: f64, sigma: f64, c_m: f64) -> Result<f64> {
    let f = expansion_f(x, tau, sigma)?;
    require(c_m.is_finite() && c_m > 0.0, "c_m", c_m, "finite and > 0")?;
    let var = sigma * sigma * tau;
    let gauss = (-x * x / (2.0 * var)).exp() / (2.0 * std::f64::consts::PI * var).sqrt();
    Ok(gauss * (1.0 + f / (c_m * c_m)))
}

/// Width `σ_DI` of the Gaussian that reproduces a density with `1/c_m²`
/// coefficient `f_value` at `(x, t)`: `σ·sqrt(1 + s)` with
/// `s = -2 f / (c_m² (1 - x²/(σ²t)))`, defined for `|s| < 1`.
pub fn density_implied_vol(x: f64, t: f64, sigma: f64, c_m: f64, f_value: f64) -> Result<f64> {
    require(t.is_finite() && t > 0.0, "t", t, "finite and > 0")?;
    require(sigma.is_finite() && sigma > 0.0, "sigma", sigma, "finite and > 0")?;
    require(c_m.is_finite() && c_m > 0.0, "c_m", c_m, "finite and > 0")?;
    require(f_value.is_finite(), "f_value", f_value, "finite")?;
    let denom = 1.0 - x * x / (sigma * sigma * t);
    if denom == 0.0 {
        return Err(Error::Singular("x^2 = sigma^2 t"));
    }
    let s = -2.0 * f_value / (c_m * c_m * denom);
    require(s.abs() < 1.0, "s", s, "|s| < 1")?;
    Ok(sigma * (1.0 + s).sqrt())
}

/// Residual of `2σ²ξw'' + (σ² - ξ)w' + w + 3ξ/4 - ξ²/(8σ²) - 3σ²/8`, the
/// equation met by `w(ξ) = τ f(x,τ)` with `ξ = x²/τ`.
pub fn ode_residual(xi: f64, sigma: f64, w: f64, dw: f64, d2w: f64) -> Result<f64> {
    require(xi.is_finite() && xi >= 0.0, "xi", xi, "finite and >= 0")?;
    require(sigma.is_finite() && sigma > 0.0, "sigma", sigma, "finite and > 0")?;
    require(
        w.is_finite() && dw.is_finite() && d2w.is_finite(),
        "w",
        w,
        "finite value and derivatives",
    )?;
    let s2 = sigma * sigma;
    Ok(2.0 * s2 * xi * d2w + (s2 - xi) * dw + w + 0.75 * xi - xi * xi / (8.0 * s2) - 0.375 * s2)
}

/// Quadratic particular solution `-ξ²/(8σ²) + (3/8 - a/σ²)ξ + a` with its
/// first two derivatives. `a = -σ²/8` gives `τ f(x,τ)`.
pub fn quadratic_solution(xi: f64, sigma: f64, a: f64) -> (f64, f64, f64) {
    let s2 = sigma * sigma;
    let b = 0.375 - a / s2;
    (
        -xi * xi / (8.0 * s2) + b * xi + a,
        -xi / (4.0 * s2) + b,
        -1.0 / (4.0 * s2),
    )
}

/// Homogeneous solutions of the `w` equation,
/// `c1 (ξ - σ²)/(2σ) + c2 [(2√ξ/π) e^{ξ/(2σ²)} + √(2/π) erfi(√ξ/(√2σ)) (σ - ξ/σ)]`,
/// with first and second derivatives. Requires `ξ > 0`.
pub fn homogeneous_solution(xi: f64, sigma: f64, c1: f64, c2: f64) -> Result<(f64, f64, f64)> {
    require(xi.is_finite() && xi > 0.0, "xi", xi, "finite and > 0")?;
    require(sigma.is_finite() && sigma > 0.0, "sigma", sigma, "finite and > 0")?;
    use std::f64::consts::{FRAC_2_SQRT_PI, PI};
    let s2 = sigma * sigma;
    let rx = xi.sqrt();
    let e = (xi / (2.0 * s2)).exp();
    let erf_i = erfi(rx / (std::f64::consts::SQRT_2 * sigma))?;
    let k = (2.0 / PI).sqrt();
    // d/dξ erfi(√ξ/(√2σ)) = (2/√π) e^{ξ/(2σ²)} / (2√2 σ √ξ)
    let derfi = FRAC_2_SQRT_PI * e / (2.0 * std::f64::consts::SQRT_2 * sigma * rx);
    let lin = sigma - xi / sigma;

    let g = 2.0 * rx / PI * e + k * erf_i * lin;
    // g' = (2/π)(1/(2√ξ) + √ξ/(2σ²)) e + k (derfi·lin - erfi/σ)
    let dg = 2.0 / PI * (0.5 / rx + rx / (2.0 * s2)) * e + k * (derfi * lin - erf_i / sigma);
    // derfi' = derfi (1/(2σ²) - 1/(2ξ))
    let d2erfi = derfi * (0.5 / s2 - 0.5 / xi);
    let d2g = 2.0 / PI * (-0.25 / (rx * xi) + 0.5 / (s2 * rx) + rx / (4.0 * s2 * s2)) * e
        + k * (d2erfi * lin - 2.0 * derfi / sigma);

    Ok((
        c1 * (xi - s2) / (2.0 * sigma) + c2 * g,
        c1 / (2.0 * sigma) + c2 * dg,
        c2 * d2g,
    ))
}

/// Failure of the Chapman-Kolmogorov (semigroup) identity for the marginal
/// density: `p(·, 2τ)` against `p(·, τ) ⊗ p(·, τ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsDeviation {
    /// `|p_cont(x-z, 2τ) - (p ⊗ p)_cont(x-z)|`.
    pub deviation: f64,
    pub direct: f64,
    pub composed: f64,
    pub quad_error: f64,
    /// Total variation between the point masses of `p(·,2τ)` and of the
    /// composition (which carries `w²` at `±2c_mτ` and `2w²` at the origin).
    pub atom_mismatch: f64,
}

/// Semigroup violation at displacement `x - z` after two steps of length `τ`.
///
/// The atom-by-continuous cross terms `2w [p_cont(d - c_mτ) + p_cont(d + c_mτ)]`
/// are added analytically; the continuous-by-continuous term is integrated.
pub fn ks_deviation(
    x: f64,
    z: f64,
    tau: f64,
    params: &TelegraphParams,
    cfg: &QuadConfig,
) -> Result<KsDeviation> {
    require(tau.is_finite() && tau > 0.0, "tau", tau, "finite and > 0")?;
    require(x.is_finite() && z.is_finite(), "x - z", x - z, "finite")?;
    let d = x - z;
    let a = params.c_m * tau;
    let w = atom_weight(tau, params)?;
    let direct = p_cont(d, 2.0 * tau, params);

    let cross = 2.0 * w * (p_cont(d - a, tau, params) + p_cont(d + a, tau, params));
    let lo = (-a).max(d - a);
    let hi = a.min(d + a);
    let conv = if lo < hi {
        let sd = variance(tau, params)?.sqrt();
        let centre = 0.5 * d;
        let mut pts = vec![lo, hi, centre];
        for k in [0.5, 1.0, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0, 32.0, 64.0] {
            pts.push(centre + k * sd);
            pts.push(centre - k * sd);
        }
        for p in [-a, a, d - a, d + a] {
            pts.push(p);
        }
        pts.retain(|p| *p >= lo && *p <= hi);
        quad::integrate(
            |y| p_cont(d - y, tau, params) * p_cont(y, tau, params),
            &pts,
            cfg,
        )?
    } else {
        Integral {
            value: 0.0,
            error: 0.0,
            panels: 0,
        }
    };
    let composed = conv.value + cross;
    Ok(KsDeviation {
        deviation: (direct - composed).abs(),
        direct,
        composed,
        quad_error: conv.error,
        atom_mismatch: 4.0 * w * w,
    })
}
