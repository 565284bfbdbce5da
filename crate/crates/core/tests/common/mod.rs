#![allow(dead_code)]

use exctime_core::{ClassMap, RaySpec, StarChainModel, SubordinatorSpec};

pub fn single_state(entry: f64, exit: f64) -> RaySpec {
    RaySpec {
        states: vec!["x".into()],
        internal_rates: vec![vec![0.0]],
        exit_rates: vec![exit],
        entry_rates: vec![entry],
    }
}

/// Two states in series: entry at the first, exit from the first only.
pub fn birth_death() -> RaySpec {
    RaySpec {
        states: vec!["near".into(), "far".into()],
        internal_rates: vec![vec![0.0, 0.7], vec![1.3, 0.0]],
        exit_rates: vec![1.0, 0.0],
        entry_rates: vec![0.6, 0.0],
    }
}

/// Three states with entries into two of them.
pub fn three_state() -> RaySpec {
    RaySpec {
        states: vec!["a".into(), "b".into(), "c".into()],
        internal_rates: vec![vec![0.0, 0.5, 0.2], vec![0.4, 0.0, 0.9], vec![0.0, 0.3, 0.0]],
        exit_rates: vec![0.8, 0.1, 0.0],
        entry_rates: vec![0.3, 0.0, 0.5],
    }
}

pub fn two_ray_model() -> StarChainModel {
    StarChainModel::new(vec![birth_death(), single_state(1.0, 2.0)]).unwrap()
}

pub fn stable(b: f64, g: f64) -> SubordinatorSpec {
    SubordinatorSpec::stable(b, g).unwrap()
}

pub fn drift(a: f64) -> SubordinatorSpec {
    SubordinatorSpec::drift_only(a).unwrap()
}

pub fn mixed(a: f64, b: f64, g: f64) -> SubordinatorSpec {
    SubordinatorSpec::new(a, b, g).unwrap()
}

/// Holding at `o` stable(0.6), ray 1 stable(0.5), ray 2 drift plus stable(0.7).
pub fn two_ray_map() -> ClassMap {
    ClassMap::per_class(vec![stable(1.0, 0.6), stable(1.0, 0.5), mixed(0.5, 2.0, 0.7)])
}

pub fn mean_se(v: &[f64]) -> (f64, f64) {
    exctime_core::stat_tests::mean_se(v).unwrap()
}
