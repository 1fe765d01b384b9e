use chrono::NaiveDate;
use proptest::prelude::*;

use relbs::io::{max_log_return, run_curve, Curve, CurveKind, CurveParams, Grid, PriceRecord, PriceSeries};
use relbs::quad::QuadConfig;
use relbs::{MarketParams, OptionKind};

fn series(closes: &[f64]) -> PriceSeries {
    let start = NaiveDate::from_ymd_opt(2000, 1, 3).unwrap();
    PriceSeries::new(
        closes
            .iter()
            .enumerate()
            .map(|(i, &close)| PriceRecord {
                date: start + chrono::Days::new(i as u64),
                close,
            })
            .collect(),
    )
    .unwrap()
}

#[test]
fn table_rows() {
    let wmt = max_log_return(&series(&[0.0192, 0.0092])).unwrap();
    assert!((wmt.log_return + 0.735_707).abs() < 1e-6);
    assert!((wmt.max_abs_log_return - 0.735_707).abs() < 1e-6);
    let intc = max_log_return(&series(&[0.0091, 0.0183])).unwrap();
    assert!((intc.log_return - 0.698_627).abs() < 1e-6);
    let aapl = max_log_return(&series(&[26.18, 12.60])).unwrap();
    assert_eq!(aapl.log_return, (12.60f64 / 26.18).ln());
}

#[test]
fn picks_the_largest_move() {
    let r = max_log_return(&series(&[10.0, 11.0, 7.0, 7.5, 12.0])).unwrap();
    assert_eq!((r.move_from, r.move_to), (7.5, 12.0));
}

fn params(kind: OptionKind) -> CurveParams {
    CurveParams {
        market: MarketParams::new(100.0, 0.05, 0.15, 0.5).unwrap(),
        c_m: 2.5,
        kind,
        quad: QuadConfig::default(),
    }
}

#[test]
fn every_curve_round_trips_through_csv_and_json() {
    for kind in [
        CurveKind::PriceDiff,
        CurveKind::Parity,
        CurveKind::Smile,
        CurveKind::Density,
        CurveKind::IvCorrection,
    ] {
        let grid = if kind == CurveKind::Density {
            Grid::new(-1.5, 1.5, 13).unwrap()
        } else {
            Grid::new(60.0, 170.0, 12).unwrap()
        };
        let c = run_curve(kind, &params(OptionKind::Put), &grid).unwrap();
        assert_eq!(Curve::from_csv(&c.to_csv()).unwrap(), c, "{kind:?}");
        assert_eq!(serde_json::from_str::<Curve>(&c.to_json()).unwrap(), c, "{kind:?}");
    }
}

#[test]
fn price_diff_at_high_speed_is_small() {
    let mut p = params(OptionKind::Call);
    p.c_m = 2.5;
    let c = run_curve(CurveKind::PriceDiff, &p, &Grid::new(50.0, 150.0, 101).unwrap()).unwrap();
    assert!(c.points.iter().all(|pt| pt.value.unwrap().abs() < 0.006));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn power_of_two_rescaling_is_exact(
        closes in prop::collection::vec(0.01f64..1e4, 2..40),
        e in -20i32..20,
    ) {
        let s = series(&closes);
        let a = max_log_return(&s).unwrap();
        let b = max_log_return(&s.rescaled(2f64.powi(e)).unwrap()).unwrap();
        prop_assert_eq!(a.max_abs_log_return, b.max_abs_log_return);
        prop_assert_eq!(a.at_date, b.at_date);
    }

    #[test]
    fn arbitrary_rescaling_is_exact_to_rounding(
        closes in prop::collection::vec(0.01f64..1e4, 2..40),
        k in 1e-3f64..1e3,
    ) {
        let s = series(&closes);
        let a = max_log_return(&s).unwrap();
        let b = max_log_return(&s.rescaled(k).unwrap()).unwrap();
        prop_assert!((a.max_abs_log_return - b.max_abs_log_return).abs() <= 1e-13);
    }

    #[test]
    fn report_is_the_maximum(closes in prop::collection::vec(0.01f64..1e4, 2..40)) {
        let r = max_log_return(&series(&closes)).unwrap();
        prop_assert_eq!(r.max_abs_log_return, (r.move_to / r.move_from).ln().abs());
        for w in closes.windows(2) {
            prop_assert!((w[1] / w[0]).ln().abs() <= r.max_abs_log_return);
        }
    }

    #[test]
    fn csv_round_trip_is_exact(
        start in 10.0f64..100.0,
        width in 1.0f64..100.0,
        n in 2usize..12,
        c_m in 0.3f64..12.0,
        sigma in 0.05f64..0.5,
    ) {
        let mut p = params(OptionKind::Call);
        p.c_m = c_m;
        p.market.sigma = sigma;
        let c = run_curve(CurveKind::IvCorrection, &p, &Grid::new(start, start + width, n).unwrap()).unwrap();
        prop_assert_eq!(Curve::from_csv(&c.to_csv()).unwrap(), c);
    }
}
