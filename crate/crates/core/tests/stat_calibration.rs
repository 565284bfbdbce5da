//! Behaviour of the statistical checks under null and alternative data.

use exctime_core::derive_stream;
use exctime_core::stat_tests::{dispersion_independence, empirical_laplace, ks_test, tail_index_fit};
use exctime_core::Error;
use rand::Rng;
use rand_distr::{Distribution, Poisson};
use statrs::distribution::{ChiSquared, ContinuousCDF};

#[test]
fn ks_uniform_passes_for_nearly_all_seeds() {
    let seeds = 100;
    let passes = (0..seeds)
        .filter(|&s| {
            let mut rng = derive_stream(51, s);
            let xs: Vec<f64> = (0..100_000).map(|_| rng.uniform_open::<f64>()).collect();
            ks_test("u", &xs, |x| x.clamp(0.0, 1.0)).unwrap().passed
        })
        .count();
    assert!(passes >= 99, "{passes} of {seeds}");
}

#[test]
fn ks_rejects_a_shifted_uniform() {
    let mut rng = derive_stream(52, 0);
    let xs: Vec<f64> = (0..100_000).map(|_| 0.05 + rng.uniform_open::<f64>()).collect();
    let r = ks_test("shift", &xs, |x| x.clamp(0.0, 1.0)).unwrap();
    assert!(r.p_value.unwrap() < 1e-6);
}

#[test]
fn ks_false_alarm_rate_is_calibrated() {
    let trials = 1000;
    let failures = (0..trials)
        .filter(|&s| {
            let mut rng = derive_stream(53, s);
            let xs: Vec<f64> = (0..500).map(|_| rng.exponential::<f64>()).collect();
            !ks_test("exp", &xs, |x| 1.0 - (-x.max(0.0)).exp()).unwrap().passed
        })
        .count();
    // nominal size 1e-3
    assert!(failures as f64 <= 2.0 * 1e-3 * trials as f64, "{failures} failures");
}

#[test]
fn laplace_of_exponential() {
    let mut rng = derive_stream(54, 0);
    let xs: Vec<f64> = (0..100_000).map(|_| rng.exponential::<f64>()).collect();
    let (m, se) = empirical_laplace(&xs, 1.0).unwrap();
    assert!((m - 0.5).abs() <= 4.0 * se);
}

#[test]
fn tail_fit_on_pareto_half() {
    let mut rng = derive_stream(55, 0);
    let xs: Vec<f64> = (0..1_000_000).map(|_| rng.uniform_open::<f64>().powf(-2.0)).collect();
    let fit = tail_index_fit(&xs, 0.95, 0.999).unwrap();
    assert!((0.45..=0.55).contains(&fit.loglog), "{fit:?}");
    assert!((0.45..=0.55).contains(&fit.hill), "{fit:?}");
    assert!(!fit.non_power);
}

#[test]
fn tail_fit_flags_an_exponential_tail() {
    let mut rng = derive_stream(56, 0);
    let xs: Vec<f64> = (0..1_000_000).map(|_| rng.exponential::<f64>()).collect();
    let fit = tail_index_fit(&xs, 0.95, 0.999).unwrap();
    assert!(fit.non_power, "{fit:?}");
    assert!(fit.hill > fit.hill_mid);
}

#[test]
fn tail_fit_errors() {
    assert!(matches!(
        tail_index_fit(&[2.0; 100_000], 0.95, 0.999),
        Err(Error::InsufficientData(_))
    ));
    assert!(matches!(
        tail_index_fit(&[1.0, 2.0, 3.0], 0.95, 0.999),
        Err(Error::InsufficientData(_))
    ));
    assert!(matches!(tail_index_fit(&[1.0; 10], 0.5, 0.999), Err(Error::Domain(_))));
}

fn poisson_rows(seed: u64, rows: usize, windows: usize, mean: f64) -> Vec<Vec<u64>> {
    let mut rng = derive_stream(seed, 0);
    let p = Poisson::new(mean).unwrap();
    (0..rows)
        .map(|_| (0..windows).map(|_| p.sample(&mut rng) as u64).collect())
        .collect()
}

#[test]
fn dispersion_passes_on_poisson_counts() {
    let out = dispersion_independence(&poisson_rows(57, 2000, 200, 3.0)).unwrap();
    assert!(out.passed(), "{out:?}");
    assert!(out.correlation.is_some());
}

#[test]
fn dispersion_fails_on_overdispersed_counts() {
    // negative binomial as a gamma mixture of Poissons
    let mut rng = derive_stream(58, 0);
    let gamma = rand_distr::Gamma::new(2.0, 1.5).unwrap();
    let rows: Vec<Vec<u64>> = (0..20)
        .map(|_| {
            (0..200)
                .map(|_| Poisson::new(gamma.sample(&mut rng)).unwrap().sample(&mut rng) as u64)
                .collect()
        })
        .collect();
    assert!(!dispersion_independence(&rows).unwrap().dispersion.passed);
}

#[test]
fn dispersion_fails_on_correlated_windows() {
    let mut rng = derive_stream(59, 0);
    let rows: Vec<Vec<u64>> = (0..2000)
        .map(|_| {
            let level = if rng.random_bool(0.5) { 2.0 } else { 4.0 };
            let p = Poisson::new(level).unwrap();
            (0..200).map(|_| p.sample(&mut rng) as u64).collect()
        })
        .collect();
    let out = dispersion_independence(&rows).unwrap();
    assert!(!out.correlation.unwrap().passed);
}

#[test]
fn dispersion_false_alarm_rate_is_calibrated() {
    let m = 200;
    let trials = 1000;
    let failures = (0..trials)
        .filter(|&s| {
            !dispersion_independence(&poisson_rows(1000 + s, 1, m, 3.0))
                .unwrap()
                .passed()
        })
        .count();
    // nominal size: (M-1)·index is close to χ²(M-1) under the null
    let chi = ChiSquared::new((m - 1) as f64).unwrap();
    let df = (m - 1) as f64;
    let half = 4.0 * (2.0 / df).sqrt() * df;
    let nominal = chi.cdf(df - half) + (1.0 - chi.cdf(df + half));
    assert!(
        failures as f64 <= 2.0 * nominal * trials as f64 + 1.0,
        "{failures} failures, nominal {nominal}"
    );
}

#[test]
fn dispersion_needs_enough_windows() {
    assert!(dispersion_independence(&[vec![3]]).is_err());
}
