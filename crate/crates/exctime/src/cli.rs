//! Command-line interface of the `exctime` binary.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::limits::{simulate_limits, write_limits_csv};
use crate::output::write_bundle;
use crate::plot::{cmd_plot, RowFilter};
use crate::run::pool;
use crate::simulate::cmd_simulate;
use crate::structure::cmd_verify_structure;

#[derive(Debug, Parser)]
#[command(
    name = "exctime",
    version,
    about = "Excursion-dependent time changes of star-shaped Markov chains"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate one path and write its ledger, class summary and occupation curves.
    Simulate(RunArgs),
    /// Run the structural suites and write a report bundle.
    VerifyStructure(RunArgs),
    /// Run the limit experiments over the λ grid.
    Limits(RunArgs),
    /// Draw ECDF and log-log tail plots of one CSV column.
    Plot(PlotArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long, value_name = "FILE")]
    pub config: PathBuf,
    /// Output directory; defaults to `output_dir` from the config.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Overrides the master seed of the config.
    #[arg(long, value_name = "N")]
    pub seed: Option<u64>,
    #[arg(long, value_name = "K", env = "EXCTIME_THREADS")]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// CSV table; repeat for overlays (legend follows the given order).
    #[arg(long = "input", value_name = "CSV", required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long, value_name = "NAME")]
    pub column: String,
    /// Keep only rows with COLUMN equal to VALUE, e.g. `lambda=10000`.
    #[arg(long = "where", value_name = "COLUMN=VALUE", value_parser = parse_filter)]
    pub filter: Option<RowFilter>,
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

fn parse_filter(text: &str) -> std::result::Result<RowFilter, String> {
    let (column, value) = text.split_once('=').ok_or("expected COLUMN=VALUE")?;
    let value = value.trim().parse().map_err(|_| format!("'{value}' is not a number"))?;
    Ok(RowFilter {
        column: column.trim().to_string(),
        value,
    })
}

/// Outcome of a subcommand: whether every gated check passed, and a short
/// human-readable account.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub passed: bool,
    pub message: String,
}

struct Prepared {
    config: ExperimentConfig,
    seed: u64,
    out: PathBuf,
}

fn prepare(args: &RunArgs) -> Result<Prepared> {
    let config = ExperimentConfig::load(&args.config)?;
    let seed = args.seed.unwrap_or(config.seed);
    let out = args
        .out
        .clone()
        .or_else(|| config.output_dir.clone())
        .ok_or_else(|| Error::Config("no output directory: pass --out or set output_dir".into()))?;
    fs::create_dir_all(&out)?;
    let mut effective = config.clone();
    effective.seed = seed;
    fs::write(out.join("config.json"), effective.to_json() + "\n")?;
    Ok(Prepared { config, seed, out })
}

fn relative(dir: &Path, name: &str) -> String {
    dir.join(name).display().to_string()
}

pub fn execute(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Simulate(args) => {
            let p = prepare(args)?;
            let summary = cmd_simulate(&p.config, p.seed, &p.out)?;
            let n: usize = summary.iter().skip(1).map(|s| s.count).sum();
            Ok(Outcome {
                passed: true,
                message: format!("simulated {n} excursions; wrote {}", relative(&p.out, "ledger.csv")),
            })
        }
        Command::VerifyStructure(args) => {
            let p = prepare(args)?;
            let pool = pool(args.threads)?;
            let reports = cmd_verify_structure(&p.config, p.seed, &pool)?;
            let passed = write_bundle(
                &p.out,
                &p.config.experiment,
                "verify-structure",
                p.seed,
                &reports,
                |_| true,
            )?;
            Ok(Outcome {
                passed,
                message: format!(
                    "{} of {} checks passed; wrote {}",
                    reports.iter().filter(|r| r.report.passed).count(),
                    reports.len(),
                    relative(&p.out, "reports.jsonl")
                ),
            })
        }
        Command::Limits(args) => {
            let p = prepare(args)?;
            let pool = pool(args.threads)?;
            let outcome = simulate_limits(&p.config, p.seed, &pool)?;
            write_limits_csv(&p.config, &outcome, &p.out.join("limits.csv"))?;
            let gate = outcome.largest_suite(&p.config);
            let passed = write_bundle(&p.out, &p.config.experiment, "limits", p.seed, &outcome.reports, |r| {
                r.suite == gate
            })?;
            Ok(Outcome {
                passed,
                message: format!(
                    "{} of {} checks passed ({} gates the exit status); wrote {}",
                    outcome.reports.iter().filter(|r| r.report.passed).count(),
                    outcome.reports.len(),
                    gate,
                    relative(&p.out, "limits.csv")
                ),
            })
        }
        Command::Plot(args) => {
            let written = cmd_plot(&args.inputs, &args.column, args.filter.as_ref(), &args.out)?;
            let names: Vec<String> = written.iter().map(|p| p.display().to_string()).collect();
            Ok(Outcome {
                passed: true,
                message: format!("wrote {}", names.join(", ")),
            })
        }
    }
}
