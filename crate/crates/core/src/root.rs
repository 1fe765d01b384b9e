//! Bracketed scalar root finding (Brent's method).

use crate::error::{Error, Result};

/// Outcome of a successful root search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub fx: f64,
    pub iterations: usize,
}

/// Finds `x ∈ [a, b]` with `|f(x)| ≤ ftol` given `f(a)` and `f(b)` of
/// opposite sign (or one of them already within tolerance). If the bracket
/// shrinks to adjacent floats first, that point is returned and the caller
/// decides whether `fx` is acceptable.
///
/// Inverse quadratic interpolation and secant steps are accepted only while
/// they stay inside the bracket and shrink it fast enough; otherwise the step
/// falls back to bisection, so the bracket is always maintained.
pub fn brent<F: FnMut(f64) -> f64>(
    mut f: F,
    mut a: f64,
    mut b: f64,
    ftol: f64,
    max_iter: usize,
) -> Result<Root> {
    let mut fa = f(a);
    let mut fb = f(b);
    if !fa.is_finite() || !fb.is_finite() {
        return Err(Error::NonFinite);
    }
    if fa.abs() <= ftol {
        return Ok(Root { x: a, fx: fa, iterations: 0 });
    }
    if fb.abs() <= ftol {
        return Ok(Root { x: b, fx: fb, iterations: 0 });
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Input(format!(
            "root not bracketed: f({a}) = {fa}, f({b}) = {fb}"
        )));
    }

    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for it in 1..=max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + f64::MIN_POSITIVE;
        let m = 0.5 * (c - b);
        if fb.abs() <= ftol {
            return Ok(Root { x: b, fx: fb, iterations: it });
        }
        if m.abs() <= tol {
            // Bracket collapsed to adjacent floats: the root is located to
            // machine precision even if |f| has not reached ftol.
            return Ok(Root { x: b, fx: fb, iterations: it });
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q) = if a == c {
                (2.0 * m * s, 1.0 - s)
            } else {
                let q0 = fa / fc;
                let r = fb / fc;
                (
                    s * (2.0 * m * q0 * (q0 - r) - (b - a) * (r - 1.0)),
                    (q0 - 1.0) * (r - 1.0) * (s - 1.0),
                )
            };
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
        if !fb.is_finite() {
            return Err(Error::NonFinite);
        }
    }
    Err(Error::IllConditioned("root search exhausted its iterations"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_simple_roots() {
        let r = brent(|x| x * x - 2.0, 0.0, 2.0, 1e-14, 100).unwrap();
        assert!((r.x - 2.0_f64.sqrt()).abs() < 1e-14);
        let r = brent(|x| x.cos() - x, 0.0, 1.0, 1e-15, 100).unwrap();
        assert!((r.x - 0.739_085_133_215_160_6).abs() < 1e-14);
        assert!(r.iterations < 15);
    }

    #[test]
    fn survives_flat_regions() {
        // Nearly flat then steep: interpolation steps are rejected, bisection
        // keeps progress.
        let r = brent(|x: f64| (x - 0.3).powi(9), -1.0, 2.0, 1e-30, 500).unwrap();
        assert!((r.x - 0.3).abs() < 1e-3);
    }

    #[test]
    fn rejects_unbracketed() {
        assert!(brent(|x| x * x + 1.0, -1.0, 1.0, 1e-12, 50).is_err());
    }

    #[test]
    fn endpoint_roots() {
        let r = brent(|x| x, 0.0, 1.0, 1e-12, 50).unwrap();
        assert_eq!((r.x, r.iterations), (0.0, 0));
    }
}
