//! `limits`: scaled occupation fractions, subdominant occupations, local
//! time and waiting times of `X*` at each `λ`, compared with the limit laws.

use std::path::Path;

use rayon::ThreadPool;

use exctime_core::limit_laws::{
    arcsine_cdf, derive_scaling, dynkin_lamperti_cdf, mittag_leffler, next_zero_cdf, sample_occupation_fractions,
    sample_waiting_times_levy_ito,
};
use exctime_core::special::gamma;
use exctime_core::stat_tests::{empirical_laplace, ks_test, ks_two_sample, mean_se, TestReport};
use exctime_core::time_change::simulate_timeline;
use exctime_core::ScalingSpec;

use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::output::{tag, write_table, SuiteReport};
use crate::run::{replicate, stream, Family};

/// Scaled observables of one replication at one `λ`.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitRow {
    /// `O^{*,(i)}(λ)/λ` for the dominant classes, in class order.
    pub fractions: Vec<f64>,
    /// `O^{*,(i)}(λ t_k)/g_i(h(λ))`, indexed `[subdominant class][k]`.
    pub subdominant: Vec<Vec<f64>>,
    /// `L_{A(λ)}/h(λ)`.
    pub local_time: f64,
    /// `G*_λ/λ` and `D*_λ/λ`.
    pub last_zero: f64,
    pub next_zero: f64,
}

#[derive(Debug, Clone)]
pub struct LimitsOutcome {
    pub scaling: ScalingSpec,
    pub subdominant_classes: Vec<usize>,
    /// Rows per `λ`, each in replication order.
    pub rows: Vec<Vec<LimitRow>>,
    pub reports: Vec<SuiteReport>,
}

impl LimitsOutcome {
    /// Suite of the largest `λ`, the only one whose reports gate the verdict.
    pub fn largest_suite(&self, config: &ExperimentConfig) -> String {
        let largest = config.lambda_grid.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        suite_name(largest)
    }
}

fn suite_name(lambda: f64) -> String {
    format!("limits_lambda{}", tag(lambda))
}

pub fn simulate_limits(config: &ExperimentConfig, seed: u64, pool: &ThreadPool) -> Result<LimitsOutcome> {
    let model = &config.model;
    let map = &config.class_map;
    let scaling = derive_scaling(model, map)?;
    let dominant = scaling.dominant_classes();
    let subdominant: Vec<usize> = (0..scaling.classes.len())
        .filter(|&i| scaling.subdominant(i).is_some())
        .collect();
    let t_max = config.t_grid.iter().copied().fold(1.0, f64::max);
    let mut rows = Vec::with_capacity(config.lambda_grid.len());
    for (j, &lambda) in config.lambda_grid.iter().enumerate() {
        let h = scaling.h(lambda);
        let at_lambda = replicate(pool, config.replications, |r| {
            let tl = simulate_timeline(
                model,
                map,
                lambda * t_max,
                &mut stream(seed, Family::Limits, j as u64, r),
            )?;
            let occ = tl.occupation(lambda)?;
            let mut sub = Vec::with_capacity(subdominant.len());
            for &i in &subdominant {
                let scale = scaling.g_class(i, h);
                let mut v = Vec::with_capacity(config.t_grid.len());
                for &t in &config.t_grid {
                    v.push(tl.occupation(lambda * t)?[i] / scale);
                }
                sub.push(v);
            }
            Ok(LimitRow {
                fractions: dominant.iter().map(|&i| occ[i] / lambda).collect(),
                subdominant: sub,
                local_time: tl.local_time(lambda)? / h,
                last_zero: tl.last_zero(lambda)? / lambda,
                next_zero: tl.next_zero(lambda)? / lambda,
            })
        })?;
        rows.push(at_lambda);
    }
    let reports = limit_reports(config, seed, pool, &scaling, &subdominant, &rows)?;
    Ok(LimitsOutcome {
        scaling,
        subdominant_classes: subdominant,
        rows,
        reports,
    })
}

fn limit_reports(
    config: &ExperimentConfig,
    seed: u64,
    pool: &ThreadPool,
    scaling: &ScalingSpec,
    subdominant: &[usize],
    rows: &[Vec<LimitRow>],
) -> Result<Vec<SuiteReport>> {
    let alpha = scaling.alpha;
    let dominant = scaling.dominant_classes();
    let betas = scaling.dominant_betas();
    let lim = &config.limits;
    let n_oracle = lim.oracle_samples;
    let symmetric_arcsine = betas.len() == 2 && alpha == 0.5 && betas[0] == betas[1];
    let fraction_oracle: Vec<Vec<f64>> = if betas.len() >= 2 && !symmetric_arcsine {
        replicate(pool, n_oracle, |r| {
            sample_occupation_fractions(alpha, &betas, &mut stream(seed, Family::Oracle, 0, r))
        })?
    } else {
        Vec::new()
    };
    let next_zero_oracle: Vec<f64> = replicate(pool, n_oracle, |r| {
        sample_waiting_times_levy_ito(alpha, lim.waiting_time_eps, &mut stream(seed, Family::Oracle, 1, r)).map(|p| p.1)
    })?;
    let mut out = Vec::new();
    for (&lambda, at) in config.lambda_grid.iter().zip(rows) {
        let suite = suite_name(lambda);
        let n = at.len();
        let mut reports = Vec::new();
        if betas.len() >= 2 {
            for (k, &class) in dominant.iter().enumerate() {
                let xs: Vec<f64> = at.iter().map(|row| row.fractions[k]).collect();
                let name = format!("class{class}_fraction_ks");
                reports.push(if symmetric_arcsine {
                    ks_test(&name, &xs, arcsine_cdf)?
                } else {
                    let reference: Vec<f64> = fraction_oracle.iter().map(|f| f[k]).collect();
                    ks_two_sample(&name, &xs, &reference)?
                });
            }
        }
        for (s, &class) in subdominant.iter().enumerate() {
            let (a_sub, b_sub) = scaling.subdominant(class).expect("subdominant class");
            for (k, &t) in config.t_grid.iter().enumerate() {
                let xs: Vec<f64> = at.iter().map(|row| row.subdominant[s][k]).collect();
                for &q in &config.q_grid {
                    let (m, se) = empirical_laplace(&xs, q)?;
                    let exact = mittag_leffler(alpha, -b_sub * q.powf(a_sub) * t.powf(alpha))?;
                    let band = (lim.k_se * se).max(lim.transform_floor);
                    reports.push(
                        TestReport::within_band(
                            format!("class{class}_t{}_transform_q{}", tag(t), tag(q)),
                            m,
                            exact,
                            se,
                            band,
                        )
                        .with_n(n),
                    );
                }
            }
        }
        let local: Vec<f64> = at.iter().map(|row| row.local_time).collect();
        let local_sq: Vec<f64> = local.iter().map(|x| x * x).collect();
        let (m1, se1) = mean_se(&local)?;
        let (m2, se2) = mean_se(&local_sq)?;
        reports.push(TestReport::within_se(
            "local_time_moment1",
            m1,
            1.0 / gamma(1.0 + alpha),
            se1,
            lim.k_se,
            n,
        ));
        reports.push(TestReport::within_se(
            "local_time_moment2",
            m2,
            2.0 / gamma(1.0 + 2.0 * alpha),
            se2,
            lim.k_se,
            n,
        ));
        let g: Vec<f64> = at.iter().map(|row| row.last_zero).collect();
        let d: Vec<f64> = at.iter().map(|row| row.next_zero).collect();
        reports.push(ks_test("last_zero_ks", &g, |x| {
            dynkin_lamperti_cdf(alpha, x.clamp(0.0, 1.0)).expect("index checked")
        })?);
        let below = d.iter().filter(|&&x| x < 1.0).count();
        reports.push(TestReport::at_most("next_zero_below_one", below as f64, 0.0, n));
        reports.push(ks_two_sample("next_zero_ks_oracle", &d, &next_zero_oracle)?);
        reports.push(ks_test("next_zero_ks", &d, |x| {
            next_zero_cdf(alpha, x.max(1.0)).expect("index checked")
        })?);
        out.extend(reports.into_iter().map(|report| SuiteReport {
            suite: suite.clone(),
            report,
        }));
    }
    Ok(out)
}

pub fn write_limits_csv(config: &ExperimentConfig, outcome: &LimitsOutcome, path: &Path) -> Result<()> {
    let mut header = vec!["lambda".to_string(), "replication".to_string()];
    for &c in &outcome.scaling.dominant_classes() {
        header.push(format!("frac{c}"));
    }
    for &c in &outcome.subdominant_classes {
        for &t in &config.t_grid {
            header.push(format!("sub{c}_t{}", tag(t)));
        }
    }
    header.extend(["local_time", "last_zero", "next_zero"].map(String::from));
    let mut table = Vec::new();
    for (&lambda, at) in config.lambda_grid.iter().zip(&outcome.rows) {
        for (r, row) in at.iter().enumerate() {
            let mut v = vec![lambda, r as f64];
            v.extend(&row.fractions);
            for s in &row.subdominant {
                v.extend(s);
            }
            v.extend([row.local_time, row.last_zero, row.next_zero]);
            table.push(v);
        }
    }
    write_table(path, &header, &table)
}
