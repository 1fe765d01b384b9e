//! Side-by-side Monte Carlo and quadrature price report.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::mc::{mc_price, McConfig, McEstimate};
use crate::pricer::{telegraph_price, MarketParams, OptionSpec, PriceBreakdown};
use crate::quad::QuadConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub market: MarketParams,
    pub option: OptionSpec,
    pub c_m: f64,
    pub lambda: f64,
    pub config: McConfig,
    pub monte_carlo: McEstimate,
    pub quadrature: PriceBreakdown,
    /// `(mc - quadrature)/std_error`; `None` when the standard error is
    /// unavailable or zero.
    pub z_score: Option<f64>,
}

pub fn mc_report(
    market: &MarketParams,
    option: &OptionSpec,
    c_m: f64,
    config: &McConfig,
    quad: &QuadConfig,
) -> Result<McReport> {
    let monte_carlo = mc_price(market, option, c_m, config)?;
    let quadrature = telegraph_price(market, option, c_m, quad)?;
    let z_score = monte_carlo
        .std_error
        .filter(|s| *s > 0.0)
        .map(|s| (monte_carlo.mean - quadrature.total) / s);
    Ok(McReport {
        market: *market,
        option: *option,
        c_m,
        lambda: (c_m / market.sigma).powi(2),
        config: *config,
        monte_carlo,
        quadrature,
        z_score,
    })
}

impl McReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}
