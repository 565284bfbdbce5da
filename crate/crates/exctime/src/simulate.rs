//! `simulate`: one long path, its excursion ledger and the occupation
//! curves of the transformed path.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use exctime_core::format::g17;
use exctime_core::ledger::extract_excursions;
use exctime_core::star_chain::simulate_path;
use exctime_core::time_change::{build_clock_and_transform, mark_lifetimes, occupation_from_path};
use exctime_core::StopRule;

use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::run::{stream, Family};

/// Per-class totals over the simulated path.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassSummary {
    pub class: usize,
    pub label: String,
    /// Excursions of the class, or holdings at `o` for class 0.
    pub count: usize,
    pub lifetime: f64,
    pub marked_lifetime: f64,
}

pub fn cmd_simulate(config: &ExperimentConfig, seed: u64, out: &Path) -> Result<Vec<ClassSummary>> {
    let model = &config.model;
    let map = &config.class_map;
    let path = simulate_path(
        model,
        StopRule::Excursions(config.n_excursions),
        &mut stream(seed, Family::Simulate, 0, 0),
    )?;
    let base = stream(seed, Family::Simulate, 1, 0);
    let ledger = extract_excursions(&path, model, true)?;
    let marked = mark_lifetimes(&ledger, map, &base)?;
    let x_star = build_clock_and_transform(&path, map, &base, false)?.path;

    fs::create_dir_all(out)?;
    let mut w = BufWriter::new(File::create(out.join("ledger.csv"))?);
    marked.write_csv(&mut w)?;
    w.flush()?;

    let n = model.n_classes();
    let mut summary: Vec<ClassSummary> = (0..=n)
        .map(|class| ClassSummary {
            class,
            label: map.label(class).to_string(),
            count: 0,
            lifetime: 0.0,
            marked_lifetime: 0.0,
        })
        .collect();
    for atom in &marked.atoms {
        let hold = &mut summary[0];
        hold.count += 1;
        hold.lifetime += atom.holding_before;
        hold.marked_lifetime += atom.holding_star.expect("marked");
        let cls = &mut summary[atom.class];
        cls.count += 1;
        cls.lifetime += atom.zeta;
        cls.marked_lifetime += atom.zeta_star.expect("marked");
    }
    summary[0].count += 1;
    summary[0].lifetime += marked.trailing_holding;
    summary[0].marked_lifetime += marked.trailing_star.expect("marked");

    let duration = x_star.duration();
    let mut w = BufWriter::new(File::create(out.join("xstar_summary.csv"))?);
    writeln!(w, "class,label,count,lifetime,marked_lifetime,occupation_fraction")?;
    for s in &summary {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            s.class,
            s.label,
            s.count,
            g17(s.lifetime),
            g17(s.marked_lifetime),
            g17(s.marked_lifetime / duration)
        )?;
    }
    w.flush()?;

    let k = config.simulate.grid_points;
    let grid: Vec<f64> = (0..=k).map(|j| duration * j as f64 / k as f64).collect();
    let curves = occupation_from_path(&x_star, n, &grid)?;
    let mut w = BufWriter::new(File::create(out.join("occupation.csv"))?);
    curves.write_csv(&mut w)?;
    w.flush()?;
    Ok(summary)
}
