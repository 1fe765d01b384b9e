use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use relbs::kernel::{atom_weight, density_continuous, variance};
use relbs::mc::{mc_expectation, mc_price, sample_displacement, simulate_relativistic_gbm, McConfig};
use relbs::pricer::{first_moment, telegraph_price};
use relbs::quad::{integrate, QuadConfig};
use relbs::{MarketParams, OptionSpec, TelegraphParams};

fn base_market() -> MarketParams {
    MarketParams::new(100.0, 0.05, 0.15, 0.5).unwrap()
}

#[test]
fn histogram_matches_density_and_atoms() {
    let (c, lam, tau) = (1.0, 4.0, 0.5);
    let p = TelegraphParams::new(c, lam).unwrap();
    let n = 1_000_000usize;
    let bins = 40usize;
    let ct = c * tau;
    let mut counts = vec![0u64; bins];
    let (mut lo_atom, mut hi_atom) = (0u64, 0u64);
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..n {
        let y = sample_displacement(tau, &p, &mut rng).unwrap();
        if y == ct {
            hi_atom += 1;
        } else if y == -ct {
            lo_atom += 1;
        } else {
            let b = (((y + ct) / (2.0 * ct)) * bins as f64) as usize;
            counts[b.min(bins - 1)] += 1;
        }
    }
    let cfg = QuadConfig::absolute(1e-12);
    let w = atom_weight(tau, &p).unwrap();
    let mut chi2 = 0.0;
    for (i, &obs) in counts.iter().enumerate() {
        let a = -ct + 2.0 * ct * i as f64 / bins as f64;
        let b = -ct + 2.0 * ct * (i + 1) as f64 / bins as f64;
        let prob = integrate(|x| density_continuous(x, tau, &p).unwrap(), &[a, b], &cfg)
            .unwrap()
            .value;
        let e = prob * n as f64;
        chi2 += (obs as f64 - e).powi(2) / e;
    }
    for obs in [lo_atom, hi_atom] {
        let e = w * n as f64;
        chi2 += (obs as f64 - e).powi(2) / e;
    }
    // 95% quantile of chi-square with 41 degrees of freedom (scipy.stats.chi2.ppf).
    assert!(chi2 < 56.942, "chi2 = {chi2}");
}

#[test]
fn sample_variance_matches_closed_form() {
    let p = TelegraphParams::new(1.0, 4.0).unwrap();
    let v = variance(1.0, &p).unwrap();
    let e = mc_expectation(1.0, &p, &McConfig::new(1_000_000, 3), |y| y * y).unwrap();
    assert!(((e.mean - v) / e.std_error.unwrap()).abs() < 3.0);
}

#[test]
fn std_error_halves_when_paths_quadruple() {
    let m = base_market();
    let call = OptionSpec::call(100.0);
    let a = mc_price(&m, &call, 2.5, &McConfig::new(100_000, 1)).unwrap();
    let b = mc_price(&m, &call, 2.5, &McConfig::new(400_000, 1)).unwrap();
    let r = b.std_error.unwrap() / a.std_error.unwrap();
    assert!((r - 0.5).abs() < 0.125, "{r}");
}

#[test]
fn antithetic_estimate_agrees() {
    let m = base_market();
    let call = OptionSpec::call(100.0);
    let q = telegraph_price(&m, &call, 2.5, &QuadConfig::default()).unwrap().total;
    let cfg = McConfig {
        antithetic: true,
        ..McConfig::new(500_000, 8)
    };
    let e = mc_price(&m, &call, 2.5, &cfg).unwrap();
    assert!(((e.mean - q) / e.std_error.unwrap()).abs() < 3.0);
}

#[test]
fn deep_in_the_money_call_sees_the_martingale_defect() {
    let m = base_market();
    let c = 2.5;
    let e = mc_price(&m, &OptionSpec::call(1e-10), c, &McConfig::new(1_000_000, 5)).unwrap();
    let moment = first_moment(&m, c, &QuadConfig::default()).unwrap().value;
    let expected = m.discount() * moment - 1e-10 * m.discount();
    assert!(((e.mean - expected) / e.std_error.unwrap()).abs() < 3.0);
    assert!((expected - m.spot).abs() > 1e-3);
}

#[test]
fn vanishing_speed_is_deterministic() {
    let m = base_market();
    let e = mc_price(&m, &OptionSpec::call(90.0), 1e-6, &McConfig::new(10_000, 5)).unwrap();
    let fwd = m.spot * m.drift().exp();
    let expected = m.discount() * (fwd - 90.0);
    assert!((e.mean - expected).abs() < 1e-3);
}

#[test]
fn relativistic_gbm_stays_in_band() {
    let p = TelegraphParams::new(0.8, 3.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let (s0, mu, tau) = (50.0, 0.03, 0.7);
    for _ in 0..10_000 {
        let s = simulate_relativistic_gbm(s0, mu, tau, &p, &mut rng).unwrap();
        assert!(s >= s0 * (mu * tau - 0.8 * tau).exp() * (1.0 - 1e-14));
        assert!(s <= s0 * (mu * tau + 0.8 * tau).exp() * (1.0 + 1e-14));
    }
}

#[test]
fn same_seed_same_estimate() {
    let m = base_market();
    let call = OptionSpec::call(105.0);
    let a = mc_price(&m, &call, 1.0, &McConfig::new(30_000, 9)).unwrap();
    let b = mc_price(&m, &call, 1.0, &McConfig::new(30_000, 9)).unwrap();
    let c = mc_price(&m, &call, 1.0, &McConfig::new(30_000, 10)).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.mean, c.mean);
}
