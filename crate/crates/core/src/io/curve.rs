//! Strike- or log-price-indexed curves, evaluated point by point.
//!
//! Points are computed in parallel and collected in grid order; a point that
//! fails numerically is recorded in its row and never aborts the curve.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fmt_f64;
use crate::error::{Error, Result};
use crate::implied_vol::{first_order_iv, invert_bs};
use crate::kernel::{density_continuous, TelegraphParams};
use crate::pricer::{bs_price, parity_gap, telegraph_price, MarketParams, OptionKind, OptionSpec};
use crate::quad::QuadConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CurveKind {
    /// Black-Scholes minus telegraph price.
    PriceDiff,
    /// Telegraph call minus put minus `S - K e^{-rτ}`.
    Parity,
    /// Black-Scholes implied volatility of telegraph prices.
    Smile,
    /// Continuous part of the telegraph density at time `τ`.
    Density,
    /// First-order implied volatility.
    IvCorrection,
}

impl CurveKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::PriceDiff => "price-diff",
            Self::Parity => "parity",
            Self::Smile => "smile",
            Self::Density => "density",
            Self::IvCorrection => "iv-correction",
        }
    }

    fn from_name(s: &str) -> Option<Self> {
        [
            Self::PriceDiff,
            Self::Parity,
            Self::Smile,
            Self::Density,
            Self::IvCorrection,
        ]
        .into_iter()
        .find(|k| k.name() == s)
    }

    /// Name of the abscissa column.
    pub fn abscissa(self) -> &'static str {
        if self == Self::Density {
            "x"
        } else {
            "strike"
        }
    }
}

/// Evenly spaced inclusive grid of `points` values from `start` to `end`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub start: f64,
    pub end: f64,
    pub points: usize,
}

impl Grid {
    pub fn new(start: f64, end: f64, points: usize) -> Result<Self> {
        if !(start.is_finite() && end.is_finite()) {
            return Err(Error::Input("grid ends must be finite".into()));
        }
        if points == 0 || (points == 1 && start != end) || (points > 1 && start >= end) {
            return Err(Error::Input(format!(
                "grid {start}:{end} with {points} points is not strictly increasing"
            )));
        }
        Ok(Self { start, end, points })
    }

    /// Values are `start + i·step`, computed by multiplication so the last
    /// one is `end` exactly.
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.start];
        }
        let n = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                if i == self.points - 1 {
                    self.end
                } else {
                    self.start + (self.end - self.start) * (i as f64 / n)
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveParams {
    pub market: MarketParams,
    pub c_m: f64,
    pub kind: OptionKind,
    pub quad: QuadConfig,
}

impl CurveParams {
    pub fn lambda(&self) -> f64 {
        (self.c_m / self.market.sigma).powi(2)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "status", content = "message")]
pub enum PointStatus {
    Ok,
    /// No Black-Scholes volatility reproduces the price.
    NoSolution,
    /// The point sits on a light-cone atom.
    Atom,
    Failed(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    /// Strike, or log-price for density curves.
    pub strike: f64,
    pub value: Option<f64>,
    pub quad_error: Option<f64>,
    #[serde(flatten)]
    pub status: PointStatus,
}

impl CurvePoint {
    fn ok(strike: f64, value: f64, quad_error: Option<f64>) -> Self {
        Self {
            strike,
            value: Some(value),
            quad_error,
            status: PointStatus::Ok,
        }
    }

    fn failed(strike: f64, err: Error) -> Self {
        Self {
            strike,
            value: None,
            quad_error: None,
            status: PointStatus::Failed(err.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub curve: CurveKind,
    pub params: CurveParams,
    pub points: Vec<CurvePoint>,
}

fn point(kind: CurveKind, p: &CurveParams, k: f64) -> Result<CurvePoint> {
    let m = &p.market;
    let opt = OptionSpec { kind: p.kind, strike: k };
    Ok(match kind {
        CurveKind::PriceDiff => {
            let t = telegraph_price(m, &opt, p.c_m, &p.quad)?;
            CurvePoint::ok(k, bs_price(m, &opt)? - t.total, Some(t.quad_error))
        }
        CurveKind::Parity => CurvePoint::ok(k, parity_gap(m, p.c_m, k, &p.quad)?, None),
        CurveKind::Smile => {
            let t = telegraph_price(m, &opt, p.c_m, &p.quad)?;
            match invert_bs(t.total, m, &opt)? {
                Some(iv) => CurvePoint::ok(k, iv.sigma_implied, Some(t.quad_error)),
                None => CurvePoint {
                    strike: k,
                    value: None,
                    quad_error: Some(t.quad_error),
                    status: PointStatus::NoSolution,
                },
            }
        }
        CurveKind::Density => {
            let params = TelegraphParams::from_sigma(p.c_m, m.sigma)?;
            let v = density_continuous(k, m.tau, &params)?;
            let mut pt = CurvePoint::ok(k, v, None);
            if k.abs() == p.c_m * m.tau {
                pt.status = PointStatus::Atom;
            }
            pt
        }
        CurveKind::IvCorrection => CurvePoint::ok(k, first_order_iv(m, k, p.c_m)?, None),
    })
}

/// Evaluates `kind` at every grid value. Parameters are validated up front;
/// numerical failures at single points are recorded in their rows.
pub fn run_curve(kind: CurveKind, params: &CurveParams, grid: &Grid) -> Result<Curve> {
    params.market.validate()?;
    TelegraphParams::from_sigma(params.c_m, params.market.sigma)?;
    let xs = grid.values();
    if kind != CurveKind::Density {
        if let Some(bad) = xs.iter().find(|k| k.is_nan() || **k <= 0.0) {
            return Err(Error::Input(format!("strike {bad} is not positive")));
        }
    }
    let points = xs
        .par_iter()
        .map(|&k| point(kind, params, k).unwrap_or_else(|e| CurvePoint::failed(k, e)))
        .collect();
    Ok(Curve {
        curve: kind,
        params: params.clone(),
        points,
    })
}

fn opt_f64(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

impl Curve {
    /// CSV with a `#`-comment header holding every parameter.
    pub fn to_csv(&self) -> String {
        let p = &self.params;
        let m = &p.market;
        let mut out = String::new();
        let kind = match p.kind {
            OptionKind::Call => "call",
            OptionKind::Put => "put",
        };
        let _ = writeln!(out, "# curve={}", self.curve.name());
        for (k, v) in [
            ("spot", m.spot),
            ("rate", m.rate),
            ("sigma", m.sigma),
            ("tau", m.tau),
            ("c_m", p.c_m),
            ("lambda", p.lambda()),
            ("rel_tol", p.quad.rel_tol),
            ("abs_tol", p.quad.abs_tol),
        ] {
            let _ = writeln!(out, "# {k}={}", fmt_f64(v));
        }
        let _ = writeln!(out, "# max_panels={}", p.quad.max_panels);
        let _ = writeln!(out, "# kind={kind}");
        if self.curve == CurveKind::Density {
            let w = 0.5 * (-p.lambda() * m.tau).exp();
            let _ = writeln!(out, "# atom_weight={}", fmt_f64(w));
            let _ = writeln!(out, "# atom_positions=+-{}", fmt_f64(p.c_m * m.tau));
        }

        let mut wtr = csv::Writer::from_writer(Vec::new());
        let _ = wtr.write_record([self.curve.abscissa(), "value", "quad_error", "status", "message"]);
        for pt in &self.points {
            let (status, msg) = match &pt.status {
                PointStatus::Ok => ("ok", ""),
                PointStatus::NoSolution => ("no-solution", ""),
                PointStatus::Atom => ("atom", ""),
                PointStatus::Failed(m) => ("failed", m.as_str()),
            };
            let _ = wtr.write_record([
                fmt_f64(pt.strike).as_str(),
                &opt_f64(pt.value),
                &opt_f64(pt.quad_error),
                status,
                msg,
            ]);
        }
        out.push_str(&String::from_utf8(wtr.into_inner().expect("in-memory writer")).expect("utf-8"));
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("curve serialises")
    }

    /// Parses a document written by [`Curve::to_csv`].
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut meta = std::collections::HashMap::new();
        let mut body = String::new();
        for line in text.lines() {
            if let Some(rest) = line.strip_prefix("# ") {
                if let Some((k, v)) = rest.split_once('=') {
                    meta.insert(k.to_string(), v.to_string());
                }
            } else {
                body.push_str(line);
                body.push('\n');
            }
        }
        let get = |k: &str| -> Result<&String> {
            meta.get(k).ok_or_else(|| Error::Input(format!("missing header field {k}")))
        };
        let num = |k: &str| -> Result<f64> { parse_f64(get(k)?) };
        let curve = CurveKind::from_name(get("curve")?)
            .ok_or_else(|| Error::Input("unknown curve kind".into()))?;
        let kind = match get("kind")?.as_str() {
            "call" => OptionKind::Call,
            "put" => OptionKind::Put,
            other => return Err(Error::Input(format!("unknown option kind {other}"))),
        };
        let params = CurveParams {
            market: MarketParams {
                spot: num("spot")?,
                rate: num("rate")?,
                sigma: num("sigma")?,
                tau: num("tau")?,
            },
            c_m: num("c_m")?,
            kind,
            quad: QuadConfig {
                rel_tol: num("rel_tol")?,
                abs_tol: num("abs_tol")?,
                max_panels: get("max_panels")?
                    .parse()
                    .map_err(|e| Error::Input(format!("max_panels: {e}")))?,
            },
        };

        let mut rdr = csv::Reader::from_reader(body.as_bytes());
        let mut points = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| Error::Input(e.to_string()))?;
            let field = |i: usize| rec.get(i).unwrap_or("");
            let opt = |s: &str| -> Result<Option<f64>> {
                if s.is_empty() {
                    Ok(None)
                } else {
                    parse_f64(s).map(Some)
                }
            };
            let status = match field(3) {
                "ok" => PointStatus::Ok,
                "no-solution" => PointStatus::NoSolution,
                "atom" => PointStatus::Atom,
                "failed" => PointStatus::Failed(field(4).to_string()),
                other => return Err(Error::Input(format!("unknown status {other}"))),
            };
            points.push(CurvePoint {
                strike: parse_f64(field(0))?,
                value: opt(field(1))?,
                quad_error: opt(field(2))?,
                status,
            });
        }
        Ok(Self {
            curve,
            params,
            points,
        })
    }
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|e| Error::Input(format!("bad number {s:?}: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(c_m: f64) -> CurveParams {
        CurveParams {
            market: MarketParams::new(100.0, 0.05, 0.15, 0.5).unwrap(),
            c_m,
            kind: OptionKind::Call,
            quad: QuadConfig::default(),
        }
    }

    #[test]
    fn grid_values() {
        let g = Grid::new(50.0, 150.0, 101).unwrap();
        let v = g.values();
        assert_eq!(v.len(), 101);
        assert_eq!(v[0], 50.0);
        assert_eq!(v[100], 150.0);
        assert!(v.windows(2).all(|w| w[0] < w[1]));
        assert!(Grid::new(1.0, 1.0, 3).is_err());
        assert!(Grid::new(1.0, 0.0, 3).is_err());
        assert!(Grid::new(1.0, 2.0, 0).is_err());
        assert_eq!(Grid::new(3.0, 3.0, 1).unwrap().values(), vec![3.0]);
    }

    #[test]
    fn density_curve_respects_light_cone() {
        let mut p = params(2.0);
        p.market.tau = 0.5;
        let c = run_curve(CurveKind::Density, &p, &Grid::new(-1.5, 1.5, 31).unwrap()).unwrap();
        for pt in &c.points {
            if pt.strike.abs() >= 1.0 {
                assert_eq!(pt.value, Some(0.0));
            }
        }
        assert!(c.points.iter().any(|pt| pt.status == PointStatus::Atom));
    }

    #[test]
    fn failures_are_recorded_in_row() {
        let c = run_curve(CurveKind::IvCorrection, &params(10.0), &Grid::new(100.0, 1e7, 2).unwrap())
            .unwrap();
        assert_eq!(c.points[0].status, PointStatus::Ok);
        assert!(matches!(c.points[1].status, PointStatus::Failed(_)));
    }

    #[test]
    fn invalid_parameters_fail_up_front() {
        let mut p = params(10.0);
        p.market.sigma = -1.0;
        assert!(run_curve(CurveKind::Parity, &p, &Grid::new(90.0, 110.0, 3).unwrap()).is_err());
        let p = params(10.0);
        assert!(run_curve(CurveKind::Parity, &p, &Grid::new(-1.0, 110.0, 3).unwrap()).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let c = run_curve(CurveKind::Smile, &params(0.5), &Grid::new(70.0, 180.0, 12).unwrap()).unwrap();
        assert!(c.points.iter().any(|p| p.status == PointStatus::NoSolution));
        let back = Curve::from_csv(&c.to_csv()).unwrap();
        assert_eq!(back, c);
        let json: Curve = serde_json::from_str(&c.to_json()).unwrap();
        assert_eq!(json, c);
    }
}
