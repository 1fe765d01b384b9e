//! C ABI over the `relbs` pricer.
//!
//! Every function returns a [`RelbsStatus`] and writes results through out
//! pointers. On failure the out pointers are untouched and
//! [`relbs_last_error`] describes the error on the calling thread. Panics
//! never cross the boundary; they are reported as `RELBS_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use relbs::implied_vol;
use relbs::io::max_log_return_index;
use relbs::kernel::{self, TelegraphParams};
use relbs::mc::{self, McConfig};
use relbs::pricer;
use relbs::quad::QuadConfig;
use relbs::special_fn;
use relbs::{Error, MarketParams, OptionKind, OptionSpec};

/// Result codes shared by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelbsStatus {
    Ok = 0,
    /// An argument is outside the domain of the function.
    Domain = 1,
    Overflow = 2,
    Singular = 3,
    IllConditioned = 4,
    /// Quadrature did not reach its tolerance.
    NoConvergence = 5,
    NonFinite = 6,
    /// Malformed input data.
    Input = 7,
    NullPointer = 8,
    /// No volatility reproduces the price.
    NoSolution = 9,
    Panic = 10,
}

/// Values accepted by the `kind` argument.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelbsOptionKind {
    Call = 0,
    Put = 1,
}

/// Market, maximal speed and quadrature tolerance. Opaque to C.
pub struct RelbsModel {
    market: MarketParams,
    c_m: f64,
    quad: QuadConfig,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct RelbsPriceBreakdown {
    pub atom_contribution: f64,
    pub continuous_contribution: f64,
    pub total: f64,
    pub quad_error: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct RelbsMcEstimate {
    pub mean: f64,
    /// NaN when a single path gives no spread estimate.
    pub std_error: f64,
    pub n_paths: u64,
    pub seed: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> RelbsStatus {
    match e {
        Error::Domain { .. } => RelbsStatus::Domain,
        Error::Overflow { .. } => RelbsStatus::Overflow,
        Error::Singular(_) => RelbsStatus::Singular,
        Error::IllConditioned(_) => RelbsStatus::IllConditioned,
        Error::NoConvergence { .. } => RelbsStatus::NoConvergence,
        Error::NonFinite => RelbsStatus::NonFinite,
        Error::Input(_) => RelbsStatus::Input,
    }
}

enum Fail {
    Lib(Error),
    Null(&'static str),
    NoSolution,
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

type Outcome = std::result::Result<(), Fail>;

fn guard(f: impl FnOnce() -> Outcome) -> RelbsStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RelbsStatus::Ok,
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Fail::Null(name))) => {
            set_error(format!("{name} is a null pointer"));
            RelbsStatus::NullPointer
        }
        Ok(Err(Fail::NoSolution)) => {
            set_error("no volatility in range reproduces the price".into());
            RelbsStatus::NoSolution
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            RelbsStatus::Panic
        }
    }
}

/// # Safety
/// `p` is null or valid for writes of `T`.
unsafe fn write<T>(p: *mut T, name: &'static str, v: T) -> Outcome {
    if p.is_null() {
        return Err(Fail::Null(name));
    }
    p.write(v);
    Ok(())
}

/// # Safety
/// `p` is null or points to a live model.
unsafe fn model<'a>(p: *const RelbsModel) -> std::result::Result<&'a RelbsModel, Fail> {
    p.as_ref().ok_or(Fail::Null("model"))
}

fn option(kind: u32, strike: f64) -> std::result::Result<OptionSpec, Fail> {
    let kind = match kind {
        k if k == RelbsOptionKind::Call as u32 => OptionKind::Call,
        k if k == RelbsOptionKind::Put as u32 => OptionKind::Put,
        k => {
            return Err(Error::Domain {
                name: "kind",
                value: k as f64,
                expected: "RELBS_OPTION_KIND_CALL or RELBS_OPTION_KIND_PUT",
            }
            .into())
        }
    };
    Ok(OptionSpec::new(kind, strike)?)
}

impl RelbsModel {
    fn params(&self) -> std::result::Result<TelegraphParams, Fail> {
        Ok(TelegraphParams::from_sigma(self.c_m, self.market.sigma)?)
    }
}

/// Message for the last failed call on this thread, or null after a
/// success. Valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn relbs_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Creates a model. `rel_tol` is the relative quadrature tolerance; pass 0
/// for the default of 1e-9. Release with [`relbs_model_free`].
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn relbs_model_new(
    spot: f64,
    rate: f64,
    sigma: f64,
    tau: f64,
    c_m: f64,
    rel_tol: f64,
    out: *mut *mut RelbsModel,
) -> RelbsStatus {
    guard(|| {
        if out.is_null() {
            return Err(Fail::Null("out"));
        }
        let market = MarketParams::new(spot, rate, sigma, tau)?;
        TelegraphParams::from_sigma(c_m, sigma)?;
        let mut quad = QuadConfig::default();
        if rel_tol != 0.0 {
            if !(rel_tol.is_finite() && rel_tol > 0.0) {
                return Err(Error::Domain {
                    name: "rel_tol",
                    value: rel_tol,
                    expected: "finite and > 0",
                }
                .into());
            }
            quad.rel_tol = rel_tol;
        }
        out.write(Box::into_raw(Box::new(RelbsModel { market, c_m, quad })));
        Ok(())
    })
}

/// Releases a model. Null is ignored.
///
/// # Safety
/// `model` is null or came from [`relbs_model_new`] and was not yet freed.
#[no_mangle]
pub unsafe extern "C" fn relbs_model_free(model: *mut RelbsModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Black-Scholes price at the model volatility.
///
/// # Safety
/// `model` is a live model and `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn relbs_bs_price(
    model: *const RelbsModel,
    kind: u32,
    strike: f64,
    out: *mut f64,
) -> RelbsStatus {
    guard(|| {
        let m = self::model(model)?;
        let v = pricer::bs_price(&m.market, &option(kind, strike)?)?;
        write(out, "out", v)
    })
}

/// Price under the telegraph law by quadrature.
///
/// # Safety
/// `model` is a live model and `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn relbs_telegraph_price(
    model: *const RelbsModel,
    kind: u32,
    strike: f64,
    out: *mut RelbsPriceBreakdown,
) -> RelbsStatus {
    guard(|| {
        let m = self::model(model)?;
        let b = pricer::telegraph_price(&m.market, &option(kind, strike)?, m.c_m, &m.quad)?;
        write(
            out,
            "out",
            RelbsPriceBreakdown {
                atom_contribution: b.atom_contribution,
                continuous_contribution: b.continuous_contribution,
                total: b.total,
                quad_error: b.quad_error,
            },
        )
    })
}

/// Black-Scholes price plus the closed-form `1/c_m²` correction.
///
/// # Safety
/// `model` is a live model and `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn relbs_corrected_price(
    model: *const RelbsModel,
    kind: u32,
    strike: f64,
    out: *mut f64,
) -> RelbsStatus {
    guard(|| {
        let m = self::model(model)?;
        let v = pricer::corrected_price(&m.market, &option(kind, strike)?, m.c_m)?;
        write(out, "out", v)
    })
}

/// Black-Scholes implied volatility of `price`. The model volatility is
/// ignored. Returns `RELBS_STATUS_NO_SOLUTION` when no volatility in
/// `[1e-6, 5]` reproduces the price.
///
/// # Safety
/// `model` is a live model and `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn relbs_implied_vol(
    model: *const RelbsModel,
    kind: u32,
    strike: f64,
    price: f64,
    out: *mut f64,
) -> RelbsStatus {
    guard(|| {
        let m = self::model(model)?;
        match implied_vol::invert_bs(price, &m.market, &option(kind, strike)?)? {
            Some(r) => write(out, "out", r.sigma_implied),
            None => Err(Fail::NoSolution),
        }
    })
}

/// First-order implied volatility `σ(1 + v/(c_m² vega_bar))`.
///
/// # Safety
/// `model` is a live model and `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn relbs_first_order_iv(model: *const RelbsModel, strike: f64, out: *mut f64) -> RelbsStatus {
    guard(|| {
        let m = self::model(model)?;
        write(out, "out", implied_vol::first_order_iv(&m.market, strike, m.c_m)?)
    })
}

/// Continuous part of the telegraph density of the log-displacement at
/// time `t`.
///
/// # Safety
/// `model` is a live model and `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn relbs_density(model: *const RelbsModel, x: f64, t: f64, out: *mut f64) -> RelbsStatus {
    guard(|| {
        let m = self::model(model)?;
        write(out, "out", kernel::density_continuous(x, t, &m.params()?)?)
    })
}

/// Mass at each light-cone edge `±c_m t`.
///
/// # Safety
/// `model` is a live model and `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn relbs_atom_weight(model: *const RelbsModel, t: f64, out: *mut f64) -> RelbsStatus {
    guard(|| {
        let m = self::model(model)?;
        write(out, "out", kernel::atom_weight(t, &m.params()?)?)
    })
}

/// Variance of the log-displacement at time `t`.
///
/// # Safety
/// `model` is a live model and `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn relbs_variance(model: *const RelbsModel, t: f64, out: *mut f64) -> RelbsStatus {
    guard(|| {
        let m = self::model(model)?;
        write(out, "out", kernel::variance(t, &m.params()?)?)
    })
}

/// Monte Carlo price from `n_paths` exact paths. Deterministic in `seed`.
///
/// # Safety
/// `model` is a live model and `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn relbs_mc_price(
    model: *const RelbsModel,
    kind: u32,
    strike: f64,
    n_paths: u64,
    seed: u64,
    antithetic: bool,
    out: *mut RelbsMcEstimate,
) -> RelbsStatus {
    guard(|| {
        let m = self::model(model)?;
        let cfg = McConfig {
            n_paths,
            seed,
            antithetic,
        };
        let e = mc::mc_price(&m.market, &option(kind, strike)?, m.c_m, &cfg)?;
        write(
            out,
            "out",
            RelbsMcEstimate {
                mean: e.mean,
                std_error: e.std_error.unwrap_or(f64::NAN),
                n_paths: e.n_paths,
                seed: e.seed,
            },
        )
    })
}

/// Largest absolute log-return between consecutive `closes`. Writes the
/// index of the close ending that move and its signed log-return.
///
/// # Safety
/// `closes` points to `len` doubles; the out pointers are valid for writes.
#[no_mangle]
pub unsafe extern "C" fn relbs_max_log_return(
    closes: *const f64,
    len: usize,
    out_index: *mut usize,
    out_log_return: *mut f64,
) -> RelbsStatus {
    guard(|| {
        if closes.is_null() {
            return Err(Fail::Null("closes"));
        }
        if out_index.is_null() {
            return Err(Fail::Null("out_index"));
        }
        let (i, lr) = max_log_return_index(std::slice::from_raw_parts(closes, len))?;
        write(out_log_return, "out_log_return", lr)?;
        out_index.write(i);
        Ok(())
    })
}

/// `e^{-z} I0(z)` for `z >= 0`.
///
/// # Safety
/// `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn relbs_bessel_i0_scaled(z: f64, out: *mut f64) -> RelbsStatus {
    guard(|| write(out, "out", special_fn::bessel_i0_scaled(z)?))
}

/// `e^{-z} I1(z)` for `z >= 0`.
///
/// # Safety
/// `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn relbs_bessel_i1_scaled(z: f64, out: *mut f64) -> RelbsStatus {
    guard(|| write(out, "out", special_fn::bessel_i1_scaled(z)?))
}

/// Standard normal distribution function.
///
/// # Safety
/// `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn relbs_norm_cdf(z: f64, out: *mut f64) -> RelbsStatus {
    guard(|| write(out, "out", special_fn::norm_cdf(z)?))
}
