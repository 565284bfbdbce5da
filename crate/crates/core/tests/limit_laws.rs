//! Samplers of the limit objects.

use exctime_core::derive_stream;
use exctime_core::limit_laws::{
    arcsine_cdf, dynkin_lamperti_cdf, next_zero_cdf, sample_inverse_stable, sample_occupation_fractions,
    sample_waiting_times, sample_waiting_times_levy_ito,
};
use exctime_core::special::gamma;
use exctime_core::stat_tests::{ks_test, ks_two_sample, mean_se};
use proptest::prelude::*;

#[test]
fn symmetric_half_fractions_follow_the_arcsine_law() {
    let mut rng = derive_stream(41, 0);
    let xs: Vec<f64> = (0..1_000_000)
        .map(|_| sample_occupation_fractions(0.5, &[0.5, 0.5], &mut rng).unwrap()[0])
        .collect();
    let r = ks_test("arcsine", &xs, arcsine_cdf).unwrap();
    assert!(r.passed, "{r:?}");
}

#[test]
fn skewed_fraction_mean() {
    // E[fraction₁] = 0.9 for β = (0.9, 0.1) at α = 1/2, from a 30-digit quadrature
    // of the F(1,1) ratio representation
    let mut rng = derive_stream(42, 0);
    let xs: Vec<f64> = (0..1_000_000)
        .map(|_| sample_occupation_fractions(0.5, &[0.9, 0.1], &mut rng).unwrap()[0])
        .collect();
    let (m, se) = mean_se(&xs).unwrap();
    assert!((m - 0.9).abs() <= 4.0 * se, "{m} ± {se}");
}

#[test]
fn fraction_law_is_permutation_equivariant() {
    let mut rng = derive_stream(43, 0);
    let a: Vec<f64> = (0..20_000)
        .map(|_| sample_occupation_fractions(0.4, &[0.2, 0.3, 0.5], &mut rng).unwrap()[0])
        .collect();
    let b: Vec<f64> = (0..20_000)
        .map(|_| sample_occupation_fractions(0.4, &[0.5, 0.3, 0.2], &mut rng).unwrap()[2])
        .collect();
    assert!(ks_two_sample("perm", &a, &b).unwrap().passed);
}

#[test]
fn fraction_sampler_domain() {
    let mut rng = derive_stream(44, 0);
    assert_eq!(sample_occupation_fractions(0.5, &[1.0], &mut rng).unwrap(), vec![1.0]);
    assert!(sample_occupation_fractions(0.5, &[0.5, 0.0, 0.5], &mut rng).is_err());
    assert!(sample_occupation_fractions(0.5, &[0.5, 0.6], &mut rng).is_err());
}

#[test]
fn inverse_stable_moments() {
    for (k, &a) in [0.3, 0.5, 0.7].iter().enumerate() {
        let mut rng = derive_stream(45, k as u64);
        let xs: Vec<f64> = (0..1_000_000)
            .map(|_| sample_inverse_stable(a, 1.0, &mut rng).unwrap())
            .collect();
        let sq: Vec<f64> = xs.iter().map(|x| x * x).collect();
        let (m1, se1) = mean_se(&xs).unwrap();
        let (m2, se2) = mean_se(&sq).unwrap();
        assert!((m1 - 1.0 / gamma(1.0 + a)).abs() <= 4.0 * se1, "α={a}: {m1}");
        assert!((m2 - 2.0 / gamma(1.0 + 2.0 * a)).abs() <= 4.0 * se2, "α={a}: {m2}");
    }
    let mut rng = derive_stream(45, 9);
    assert_eq!(sample_inverse_stable(0.5, 0.0, &mut rng).unwrap(), 0.0);
    // 1/Γ(1.5)
    assert!((1.0 / gamma(1.5f64) - std::f64::consts::FRAC_2_SQRT_PI).abs() < 1e-14);
}

#[test]
fn levy_ito_oracle_matches_beta_law_at_reference_point() {
    // P(G ≤ 0.4) at α = 0.3 from the path construction
    let mut rng = derive_stream(46, 0);
    let n = 100_000;
    let hits = (0..n)
        .filter(|_| sample_waiting_times_levy_ito(0.3, 1e-3, &mut rng).unwrap().0 <= 0.4)
        .count();
    let p = hits as f64 / n as f64;
    let se = (p * (1.0 - p) / n as f64).sqrt();
    let reference = dynkin_lamperti_cdf(0.3, 0.4).unwrap();
    assert!((p - reference).abs() <= 4.0 * se, "{p} vs {reference}");
}

#[test]
fn exact_and_levy_ito_waiting_times_agree() {
    for (k, &(a, eps)) in [(0.3, 1e-3), (0.5, 1e-3), (0.8, 1e-3)].iter().enumerate() {
        let mut rng = derive_stream(47, k as u64);
        let exact: Vec<(f64, f64)> = (0..20_000)
            .map(|_| sample_waiting_times(a, &mut rng).unwrap())
            .collect();
        let built: Vec<(f64, f64)> = (0..20_000)
            .map(|_| sample_waiting_times_levy_ito(a, eps, &mut rng).unwrap())
            .collect();
        for (g, d) in exact.iter().chain(&built) {
            assert!(*g <= 1.0 && *d >= 1.0);
        }
        let ge: Vec<f64> = exact.iter().map(|p| p.0).collect();
        let gs: Vec<f64> = built.iter().map(|p| p.0).collect();
        let de: Vec<f64> = exact.iter().map(|p| p.1).collect();
        let ds: Vec<f64> = built.iter().map(|p| p.1).collect();
        assert!(ks_two_sample("G", &ge, &gs).unwrap().passed, "α={a}");
        assert!(ks_two_sample("D", &de, &ds).unwrap().passed, "α={a}");
        assert!(
            ks_test("G cdf", &ge, |x| dynkin_lamperti_cdf(a, x.clamp(0.0, 1.0)).unwrap())
                .unwrap()
                .passed
        );
        assert!(ks_test("D cdf", &de, |x| next_zero_cdf(a, x).unwrap()).unwrap().passed);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn fractions_lie_on_the_simplex(seed in any::<u64>(), a in 0.05..0.95f64, w in proptest::collection::vec(0.01..1.0f64, 1..6)) {
        let total: f64 = w.iter().sum();
        let beta: Vec<f64> = w.iter().map(|x| x / total).collect();
        let f = sample_occupation_fractions(a, &beta, &mut derive_stream(seed, 0)).unwrap();
        let sum: f64 = f.iter().sum();
        prop_assert!((sum - 1.0).abs() <= 1e-14);
        prop_assert!(f.iter().all(|&x| (0.0..=1.0).contains(&x)));
    }

    #[test]
    fn inverse_stable_is_self_similar(seed in any::<u64>(), a in 0.05..0.95f64, t in 0.01..100.0f64, lambda in 0.01..1e4f64) {
        let x = sample_inverse_stable(a, lambda * t, &mut derive_stream(seed, 0)).unwrap();
        let y = sample_inverse_stable(a, t, &mut derive_stream(seed, 0)).unwrap();
        prop_assert!((x - lambda.powf(a) * y).abs() <= 1e-12 * x.abs().max(1e-300));
    }
}
