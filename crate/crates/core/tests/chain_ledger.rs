//! Star-chain simulation and excursion extraction.

mod common;

use std::collections::BTreeMap;

use common::*;
use exctime_core::ledger::extract_excursions;
use exctime_core::star_chain::{class_lifetime_exponent, hitting_laplace, simulate_path, State};
use exctime_core::stat_tests::empirical_laplace;
use exctime_core::{derive_stream, StarChainModel, StopRule};
use proptest::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn three_ray_model() -> StarChainModel {
    StarChainModel::new(vec![birth_death(), single_state(1.0, 2.0), three_state()]).unwrap()
}

#[test]
fn holding_means_match_rates() {
    let model = three_ray_model();
    let mut rng = derive_stream(21, 0);
    let path = simulate_path(&model, StopRule::Excursions(200_000), &mut rng).unwrap();
    let mut by_state: BTreeMap<State, Vec<f64>> = BTreeMap::new();
    for s in &path.sojourns {
        by_state.entry(s.state).or_default().push(s.duration);
    }
    for (state, v) in &by_state {
        let rate = match *state {
            State::Origin => model.q_origin(),
            State::Ray { ray, index } => model.rays()[ray].total_rates()[index],
        };
        let (m, se) = mean_se(v);
        assert!((m - 1.0 / rate).abs() <= 4.0 * se, "{state:?}: {m} vs {}", 1.0 / rate);
    }
}

#[test]
fn hitting_transform_is_decreasing_and_exponent_concave() {
    let model = three_ray_model();
    for ray in model.rays() {
        let grid: Vec<f64> = (0..60).map(|k| 0.1 * k as f64).collect();
        let phis: Vec<Vec<f64>> = grid.iter().map(|&q| hitting_laplace(ray, q).unwrap()).collect();
        for w in phis.windows(2) {
            for (a, b) in w[0].iter().zip(&w[1]) {
                assert!(b <= a);
            }
        }
    }
    for class in 1..=3 {
        let psi = |q: f64| class_lifetime_exponent(&model, class, q).unwrap();
        for k in 0..100 {
            let q = 0.05 * k as f64;
            assert!(psi(q) - 2.0 * psi(q + 0.05) + psi(q + 0.1) <= 1e-13);
        }
    }
}

#[test]
fn sampled_lifetimes_match_hitting_transform() {
    // E_μ[exp(-q ζ)] = 1 - Ψ(q)/r
    let model = three_ray_model();
    for class in 1..=3 {
        let mut rng = derive_stream(22, class as u64);
        let r = model.ray_for_class(class).unwrap().entry_total();
        let zetas: Vec<f64> = (0..200_000)
            .map(|_| {
                model
                    .sample_excursion(class, &mut rng)
                    .unwrap()
                    .iter()
                    .map(|s| s.duration)
                    .sum()
            })
            .collect();
        for &q in &[0.25, 1.0, 4.0] {
            let (m, se) = empirical_laplace(&zetas, q).unwrap();
            let exact = 1.0 - class_lifetime_exponent(&model, class, q).unwrap() / r;
            assert!((m - exact).abs() <= 4.0 * se, "class {class} q={q}: {m} vs {exact}");
        }
    }
}

#[test]
fn class_counts_per_local_time() {
    let model = three_ray_model();
    let s = 50_000.0;
    let path = simulate_path(&model, StopRule::LocalTime(s), &mut derive_stream(23, 0)).unwrap();
    let ledger = extract_excursions(&path, &model, false).unwrap();
    assert!((ledger.local_time_total() - s).abs() < 1e-6 * s);
    for class in 1..=3 {
        let count = ledger.atoms.iter().filter(|a| a.class == class).count() as f64;
        let r = model.ray_for_class(class).unwrap().entry_total();
        let se = count.sqrt() / s;
        assert!((count / s - r).abs() <= 4.0 * se, "class {class}: {} vs {r}", count / s);
    }
}

#[test]
fn atoms_spread_uniformly_over_local_time() {
    // given the total, window memberships are multinomial ∝ window length
    let model = StarChainModel::new(vec![single_state(1.0, 1.0)]).unwrap();
    let path = simulate_path(&model, StopRule::Excursions(100_000), &mut derive_stream(24, 0)).unwrap();
    let ledger = extract_excursions(&path, &model, false).unwrap();
    let total = ledger.local_time_total();
    let weights = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0];
    let wsum: f64 = weights.iter().sum();
    let mut edges = vec![0.0];
    for w in &weights {
        edges.push(edges.last().unwrap() + w / wsum * total);
    }
    *edges.last_mut().unwrap() = total * (1.0 + 1e-12);
    let windows: Vec<(f64, f64)> = edges.windows(2).map(|e| (e[0], e[1])).collect();
    let counts = ledger.window_counts(&windows, 0.0, false).unwrap();
    let n = ledger.len() as f64;
    let chi2: f64 = counts
        .iter()
        .zip(&weights)
        .map(|(c, w)| {
            let expected = n * w / wsum;
            (c[0] as f64 - expected).powi(2) / expected
        })
        .sum();
    let p = 1.0 - ChiSquared::new((weights.len() - 1) as f64).unwrap().cdf(chi2);
    assert!(p > 1e-3, "chi-square p = {p}");
}

#[test]
fn inverse_local_time_reconstructs_path_time() {
    let model = three_ray_model();
    let path = simulate_path(&model, StopRule::Excursions(5_000), &mut derive_stream(25, 0)).unwrap();
    let ledger = extract_excursions(&path, &model, false).unwrap();
    // path time at the end of each excursion
    let mut ends = Vec::new();
    let mut t = 0.0;
    for w in path.sojourns.windows(2) {
        t += w[0].duration;
        if !w[0].state.is_origin() && w[1].state.is_origin() {
            ends.push(t);
        }
    }
    ends.push(path.duration());
    assert_eq!(ends.len(), ledger.len());
    for (atom, &end) in ledger.atoms.iter().zip(&ends) {
        let eta = ledger.inverse_local_time(atom.s);
        assert!((eta - end).abs() <= 1e-9 * end, "{eta} vs {end}");
    }
}

#[test]
fn horizon_cut_drops_and_counts_the_open_excursion() {
    let model = StarChainModel::new(vec![single_state(1.0, 1e-3)]).unwrap();
    let path = simulate_path(&model, StopRule::Horizon(50.0), &mut derive_stream(26, 0)).unwrap();
    let ledger = extract_excursions(&path, &model, false).unwrap();
    if path.sojourns.last().unwrap().state.is_origin() {
        assert_eq!(ledger.dropped_incomplete, 0);
    } else {
        assert_eq!(ledger.dropped_incomplete, 1);
        assert!(ledger.dropped_duration > 0.0);
    }
    assert!((ledger.total_duration() - 50.0).abs() < 1e-9);
}

#[test]
fn single_excursion_ledger() {
    let model = two_ray_model();
    let path = simulate_path(&model, StopRule::Excursions(1), &mut derive_stream(27, 0)).unwrap();
    let ledger = extract_excursions(&path, &model, true).unwrap();
    assert_eq!(ledger.len(), 1);
    assert_eq!(ledger.trailing_holding, 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ledger_accounts_for_the_whole_path(seed in any::<u64>(), n in 1usize..300, horizon in 1.0..200.0f64, use_horizon in any::<bool>()) {
        let model = three_ray_model();
        let stop = if use_horizon { StopRule::Horizon(horizon) } else { StopRule::Excursions(n) };
        let path = simulate_path(&model, stop, &mut derive_stream(seed, 0)).unwrap();
        let ledger = extract_excursions(&path, &model, true).unwrap();
        let d = path.duration();
        prop_assert!((ledger.total_duration() - d).abs() <= 1e-9 * d.max(1.0));
        for w in ledger.atoms.windows(2) {
            prop_assert!(w[1].s >= w[0].s);
        }
        for a in &ledger.atoms {
            let parts: f64 = a.sojourns.as_ref().unwrap().iter().sum();
            prop_assert!((parts - a.zeta).abs() <= 1e-12 * a.zeta.max(1.0));
            prop_assert!(a.class >= 1 && a.class <= 3);
        }
        let windows = [(0.0, ledger.local_time_total() * 0.5), (ledger.local_time_total() * 0.5, f64::INFINITY)];
        let counts = ledger.window_counts(&windows, 0.0, false).unwrap();
        let total: u64 = counts.iter().flatten().sum();
        prop_assert_eq!(total as usize, ledger.len());
    }
}
