//! Globally adaptive Gauss-Legendre quadrature.
//!
//! Each panel carries a 30-point Gauss-Legendre estimate over the whole panel
//! and over its two halves. The halves are the accepted value and the
//! difference between the two is the panel's error estimate. The panel with
//! the largest estimate is bisected until the summed estimate meets the
//! tolerance or the panel cap is reached.
//!
//! Results are bit-reproducible: refinement is sequential and the final sum
//! is taken over panels in left-to-right order.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of Gauss-Legendre nodes per panel.
pub const GL_POINTS: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_panels: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-13,
            max_panels: 1 << 14,
        }
    }
}

impl QuadConfig {
    /// Absolute-tolerance configuration used for normalisation and moments.
    pub fn absolute(abs_tol: f64) -> Self {
        Self {
            rel_tol: 0.0,
            abs_tol,
            ..Self::default()
        }
    }
}

/// Value of a definite integral with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub panels: usize,
}

struct Rule {
    nodes: [f64; GL_POINTS],
    weights: [f64; GL_POINTS],
}

fn rule() -> &'static Rule {
    static RULE: OnceLock<Rule> = OnceLock::new();
    RULE.get_or_init(|| legendre_rule(GL_POINTS))
}

// Newton iteration on P_n from the Tricomi initial guess.
fn legendre_rule(n: usize) -> Rule {
    let mut nodes = [0.0; GL_POINTS];
    let mut weights = [0.0; GL_POINTS];
    let nf = n as f64;
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    Rule { nodes, weights }
}

fn gauss<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let r = rule();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut s = 0.0;
    for (x, w) in r.nodes.iter().zip(r.weights.iter()) {
        s += w * f(mid + half * x);
    }
    s * half
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    whole: f64,
    left: f64,
    right: f64,
}

impl Panel {
    fn new<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, whole: Option<f64>) -> Self {
        let m = 0.5 * (a + b);
        let whole = whole.unwrap_or_else(|| gauss(f, a, b));
        Self {
            a,
            b,
            whole,
            left: gauss(f, a, m),
            right: gauss(f, m, b),
        }
    }

    fn value(&self) -> f64 {
        self.left + self.right
    }

    fn error(&self) -> f64 {
        (self.whole - self.value()).abs()
    }
}

struct Ranked(Panel);

impl PartialEq for Ranked {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Ranked {}
impl PartialOrd for Ranked {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Ranked {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .error()
            .total_cmp(&other.0.error())
            .then_with(|| other.0.a.total_cmp(&self.0.a))
    }
}

/// Integrates `f` over `[breaks[0], breaks[last]]`, using every interior
/// breakpoint as an initial panel boundary.
///
/// Breakpoints need not be sorted or distinct. Fewer than two distinct finite
/// points is an input error.
pub fn integrate<F: Fn(f64) -> f64>(f: F, breaks: &[f64], cfg: &QuadConfig) -> Result<Integral> {
    let mut pts: Vec<f64> = breaks.iter().copied().filter(|x| x.is_finite()).collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    if pts.len() < 2 {
        return Err(Error::Input(
            "quadrature needs at least two distinct finite breakpoints".into(),
        ));
    }

    let mut heap = BinaryHeap::with_capacity(pts.len() * 4);
    let (mut value, mut error) = (0.0, 0.0);
    for w in pts.windows(2) {
        let p = Panel::new(&f, w[0], w[1], None);
        value += p.value();
        error += p.error();
        heap.push(Ranked(p));
    }
    if !value.is_finite() || !error.is_finite() {
        return Err(Error::NonFinite);
    }

    let target = |v: f64| cfg.abs_tol.max(cfg.rel_tol * v.abs());
    while error > target(value) {
        if heap.len() >= cfg.max_panels {
            return Err(Error::NoConvergence {
                estimate: error,
                panels: heap.len(),
            });
        }
        let Ranked(worst) = heap.pop().expect("heap holds at least one panel");
        let m = 0.5 * (worst.a + worst.b);
        if !(worst.a < m && m < worst.b) {
            // Panel cannot be split further in floating point.
            return Err(Error::NoConvergence {
                estimate: error,
                panels: heap.len() + 1,
            });
        }
        let l = Panel::new(&f, worst.a, m, Some(worst.left));
        let r = Panel::new(&f, m, worst.b, Some(worst.right));
        value += l.value() + r.value() - worst.value();
        error += l.error() + r.error() - worst.error();
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::NonFinite);
        }
        heap.push(Ranked(l));
        heap.push(Ranked(r));
    }

    // Recompute from scratch in positional order so the result does not
    // depend on the refinement history's running sums.
    let mut panels: Vec<Panel> = heap.into_iter().map(|r| r.0).collect();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let value = panels.iter().map(Panel::value).sum();
    let error = panels.iter().map(Panel::error).sum();
    Ok(Integral {
        value,
        error,
        panels: panels.len(),
    })
}
