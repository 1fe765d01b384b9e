use std::ffi::CStr;
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use relbs::pricer::{bs_price, telegraph_price};
use relbs::quad::QuadConfig;
use relbs::{MarketParams, OptionSpec};
use relbs_ffi::*;

const CALL: u32 = RelbsOptionKind::Call as u32;
const PUT: u32 = RelbsOptionKind::Put as u32;

struct Model(*mut RelbsModel);

impl Model {
    fn new(c_m: f64) -> Self {
        let mut m = ptr::null_mut();
        let s = unsafe { relbs_model_new(100.0, 0.05, 0.15, 0.5, c_m, 0.0, &mut m) };
        assert_eq!(s, RelbsStatus::Ok);
        assert!(!m.is_null());
        Model(m)
    }
}

impl Drop for Model {
    fn drop(&mut self) {
        unsafe { relbs_model_free(self.0) }
    }
}

fn last_error() -> Option<String> {
    let p = relbs_last_error();
    (!p.is_null()).then(|| unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned())
}

fn market() -> MarketParams {
    MarketParams::new(100.0, 0.05, 0.15, 0.5).unwrap()
}

#[test]
fn prices_match_the_library() {
    let m = Model::new(2.5);
    let mut bs = 0.0;
    assert_eq!(unsafe { relbs_bs_price(m.0, CALL, 100.0, &mut bs) }, RelbsStatus::Ok);
    assert_eq!(bs, bs_price(&market(), &OptionSpec::call(100.0)).unwrap());
    assert!(last_error().is_none());

    let mut b = RelbsPriceBreakdown::default();
    assert_eq!(unsafe { relbs_telegraph_price(m.0, PUT, 95.0, &mut b) }, RelbsStatus::Ok);
    let lib = telegraph_price(&market(), &OptionSpec::put(95.0), 2.5, &QuadConfig::default()).unwrap();
    assert_eq!(b.total, lib.total);
    assert_eq!(b.atom_contribution + b.continuous_contribution, b.total);

    let mut corrected = 0.0;
    assert_eq!(unsafe { relbs_corrected_price(m.0, CALL, 100.0, &mut corrected) }, RelbsStatus::Ok);
    assert!((corrected - bs).abs() < 0.05);
}

#[test]
fn implied_vol_round_trip_and_no_solution() {
    let m = Model::new(10.0);
    let mut p = 0.0;
    let mut iv = 0.0;
    unsafe {
        assert_eq!(relbs_bs_price(m.0, CALL, 110.0, &mut p), RelbsStatus::Ok);
        assert_eq!(relbs_implied_vol(m.0, CALL, 110.0, p, &mut iv), RelbsStatus::Ok);
    }
    assert!((iv - 0.15).abs() < 1e-8);
    let mut first = 0.0;
    assert_eq!(unsafe { relbs_first_order_iv(m.0, 110.0, &mut first) }, RelbsStatus::Ok);
    assert!((first - 0.15).abs() < 5e-3);

    iv = -1.0;
    assert_eq!(unsafe { relbs_implied_vol(m.0, CALL, 110.0, 0.0, &mut iv) }, RelbsStatus::NoSolution);
    assert_eq!(iv, -1.0);
    assert!(last_error().is_some());
}

#[test]
fn kernel_functions() {
    let m = Model::new(1.0);
    let (mut d, mut w, mut v) = (0.0, 0.0, 0.0);
    unsafe {
        assert_eq!(relbs_density(m.0, 0.0, 0.5, &mut d), RelbsStatus::Ok);
        assert_eq!(relbs_atom_weight(m.0, 0.5, &mut w), RelbsStatus::Ok);
        assert_eq!(relbs_variance(m.0, 0.5, &mut v), RelbsStatus::Ok);
    }
    assert!(d > 0.0);
    let lam: f64 = (1.0f64 / 0.15).powi(2);
    assert!((w - 0.5 * (-lam * 0.5).exp()).abs() < 1e-15);
    assert!(v > 0.0 && v < 0.15 * 0.15 * 0.5);

    let mut outside = 1.0;
    assert_eq!(unsafe { relbs_density(m.0, 0.6, 0.5, &mut outside) }, RelbsStatus::Ok);
    assert_eq!(outside, 0.0);
}

#[test]
fn monte_carlo_is_deterministic() {
    let m = Model::new(2.5);
    let mut a = RelbsMcEstimate::default();
    let mut b = RelbsMcEstimate::default();
    unsafe {
        assert_eq!(relbs_mc_price(m.0, CALL, 100.0, 20_000, 7, false, &mut a), RelbsStatus::Ok);
        assert_eq!(relbs_mc_price(m.0, CALL, 100.0, 20_000, 7, false, &mut b), RelbsStatus::Ok);
    }
    assert_eq!(a.mean.to_bits(), b.mean.to_bits());
    assert_eq!((a.n_paths, a.seed), (20_000, 7));
    assert!(a.std_error > 0.0);

    let mut one = RelbsMcEstimate::default();
    assert_eq!(unsafe { relbs_mc_price(m.0, CALL, 100.0, 1, 7, false, &mut one) }, RelbsStatus::Ok);
    assert!(one.std_error.is_nan());
}

#[test]
fn max_log_return_over_closes() {
    let closes = [10.0, 11.0, 7.0, 7.5, 12.0];
    let (mut i, mut lr) = (0usize, 0.0);
    let s = unsafe { relbs_max_log_return(closes.as_ptr(), closes.len(), &mut i, &mut lr) };
    assert_eq!(s, RelbsStatus::Ok);
    assert_eq!(i, 4);
    assert_eq!(lr, (12.0f64 / 7.5).ln());

    let s = unsafe { relbs_max_log_return(closes.as_ptr(), 1, &mut i, &mut lr) };
    assert_eq!(s, RelbsStatus::Input);
    let bad = [1.0, -2.0];
    let s = unsafe { relbs_max_log_return(bad.as_ptr(), 2, &mut i, &mut lr) };
    assert_eq!(s, RelbsStatus::Input);
}

#[test]
fn special_functions() {
    let (mut i0, mut i1, mut n) = (0.0, 0.0, 0.0);
    unsafe {
        assert_eq!(relbs_bessel_i0_scaled(1.0, &mut i0), RelbsStatus::Ok);
        assert_eq!(relbs_bessel_i1_scaled(0.0, &mut i1), RelbsStatus::Ok);
        assert_eq!(relbs_norm_cdf(0.0, &mut n), RelbsStatus::Ok);
    }
    assert!((i0 - 0.465_759_607_593_640_4).abs() < 1e-15);
    assert_eq!(i1, 0.0);
    assert_eq!(n, 0.5);
    assert_eq!(unsafe { relbs_bessel_i0_scaled(-1.0, &mut i0) }, RelbsStatus::Domain);
}

#[test]
fn errors_are_reported() {
    let mut m = ptr::null_mut();
    let s = unsafe { relbs_model_new(100.0, 0.05, -0.15, 0.5, 1.0, 0.0, &mut m) };
    assert_eq!(s, RelbsStatus::Domain);
    assert!(m.is_null());
    assert!(last_error().unwrap().contains("sigma"));

    let s = unsafe { relbs_model_new(100.0, 0.05, 0.15, 0.5, 1.0, 0.0, ptr::null_mut()) };
    assert_eq!(s, RelbsStatus::NullPointer);

    let mut out = 0.0;
    assert_eq!(unsafe { relbs_bs_price(ptr::null(), CALL, 100.0, &mut out) }, RelbsStatus::NullPointer);
    let model = Model::new(1.0);
    assert_eq!(unsafe { relbs_bs_price(model.0, 7, 100.0, &mut out) }, RelbsStatus::Domain);
    assert_eq!(unsafe { relbs_bs_price(model.0, CALL, 100.0, ptr::null_mut()) }, RelbsStatus::NullPointer);
    assert_eq!(unsafe { relbs_bs_price(model.0, CALL, 100.0, &mut out) }, RelbsStatus::Ok);
    assert!(last_error().is_none());
    unsafe { relbs_model_free(ptr::null_mut()) };
}

fn c_compiler() -> Option<String> {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    Command::new(&cc).arg("--version").output().ok()?.status.success().then_some(cc)
}

#[test]
fn header_compiles_and_links_from_c() {
    let Some(cc) = c_compiler() else {
        eprintln!("no C compiler found, skipping");
        return;
    };
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header = root.join("include").join("relbs.h");
    assert!(header.exists());
    let dir = std::env::temp_dir().join(format!("relbs-capi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let src = dir.join("main.c");
    std::fs::write(
        &src,
        r#"#include <math.h>
#include <stdio.h>
#include "relbs.h"

int main(void) {
    RelbsModel *m = NULL;
    if (relbs_model_new(100.0, 0.05, 0.15, 0.5, 2.5, 0.0, &m) != RELBS_STATUS_OK) return 1;
    RelbsPriceBreakdown b;
    if (relbs_telegraph_price(m, RELBS_OPTION_KIND_CALL, 100.0, &b) != RELBS_STATUS_OK) return 2;
    double iv;
    if (relbs_implied_vol(m, RELBS_OPTION_KIND_CALL, 100.0, b.total, &iv) != RELBS_STATUS_OK) return 3;
    if (relbs_bs_price(m, 9, 100.0, &iv) != RELBS_STATUS_DOMAIN || relbs_last_error() == NULL) return 4;
    relbs_model_free(m);
    printf("%.17g\n", b.total);
    return 0;
}
"#,
    )
    .unwrap();

    let syntax = Command::new(&cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(header.parent().unwrap())
        .arg(&src)
        .status()
        .unwrap();
    assert!(syntax.success());

    // The static library built alongside this test sits next to it in deps/.
    let exe = std::env::current_exe().unwrap();
    let lib = exe.parent().unwrap().join("librelbs_ffi.a");
    if !lib.exists() {
        eprintln!("{} not built, skipping link step", lib.display());
        return;
    }
    let bin = dir.join("main");
    let link = Command::new(&cc)
        .args(["-std=c99", "-I"])
        .arg(header.parent().unwrap())
        .arg(&src)
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(link.success());
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    let printed: f64 = String::from_utf8(out.stdout).unwrap().trim().parse().unwrap();
    let lib = telegraph_price(&market(), &OptionSpec::call(100.0), 2.5, &QuadConfig::default()).unwrap();
    assert_eq!(printed, lib.total);
    std::fs::remove_dir_all(&dir).ok();
}
