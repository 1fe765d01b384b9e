//! Pricing of European vanilla options when log-prices follow a telegraph
//! process: the underlying moves at a bounded log-speed `c_m` and reverses
//! direction at the events of a Poisson process with rate `λ = c_m²/σ²`.
//! In the limit `c_m → ∞` everything reduces to Black-Scholes.
//!
//! * [`special_fn`]: scaled Bessel functions, normal CDF, `erfi`.
//! * [`quad`]: adaptive Gauss-Legendre quadrature.
//! * [`kernel`]: the telegraph transition density, its moments and its
//!   `1/c_m²` expansion.
//! * [`pricer`]: Black-Scholes, the telegraph pricing integral, the corrected
//!   closed form and put-call parity auditing.
//! * [`implied_vol`]: implied-volatility inversion and its first-order formula.
//! * [`mc`]: exact Monte Carlo simulation of the telegraph process.
//! * [`io`]: price-series ingestion, curve generation and reports.

pub mod error;
pub mod implied_vol;
pub mod io;
pub mod kernel;
pub mod mc;
pub mod pricer;
pub mod quad;
pub mod root;
pub mod special_fn;

pub use error::{Error, Result};
pub use kernel::TelegraphParams;
pub use pricer::{MarketParams, OptionKind, OptionSpec, PriceBreakdown};
