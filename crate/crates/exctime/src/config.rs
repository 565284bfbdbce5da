//! Experiment configuration, read from JSON and validated before any
//! simulation starts.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use exctime_core::{ClassMap, StarChainModel};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Free-form identifier copied into every report bundle.
    pub experiment: String,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    pub model: StarChainModel,
    pub class_map: ClassMap,
    /// Replication count `R` for the Poisson suite and the limit experiments.
    #[serde(default = "default_replications")]
    pub replications: usize,
    /// Path length for `simulate` and the route-equivalence suite.
    #[serde(default = "default_excursions")]
    pub n_excursions: usize,
    #[serde(default = "default_q_grid")]
    pub q_grid: Vec<f64>,
    #[serde(default = "default_lambda_grid")]
    pub lambda_grid: Vec<f64>,
    /// Times `t_k` at which subdominant occupations are read, in units of `λ`.
    #[serde(default = "default_t_grid")]
    pub t_grid: Vec<f64>,
    #[serde(default)]
    pub simulate: SimulateConfig,
    #[serde(default)]
    pub structure: StructureConfig,
    #[serde(default)]
    pub limits: LimitsConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateConfig {
    /// Points of the evenly spaced occupation grid over the transformed path.
    pub grid_points: usize,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self { grid_points: 1000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StructureConfig {
    pub route_grid_points: usize,
    /// Replications of `Γ(1)` for the subordination and holding-class suites.
    pub subordination_replications: usize,
    pub windows: usize,
    pub window_length: f64,
    /// Transformed-lifetime threshold `h` of the counted atoms.
    pub mark_threshold: f64,
    /// Relative sup-norm tolerance between the two routes.
    pub route_tolerance: f64,
    /// Width of the acceptance bands in standard errors.
    pub k_se: f64,
    /// Specs used for the subordination references instead of `class_map`;
    /// a deliberately wrong map here is a negative control.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_class_map: Option<ClassMap>,
}

impl Default for StructureConfig {
    fn default() -> Self {
        Self {
            route_grid_points: 5000,
            subordination_replications: 100_000,
            windows: 200,
            window_length: 1.0,
            mark_threshold: 1.0,
            route_tolerance: 1e-9,
            k_se: 4.0,
            oracle_class_map: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LimitsConfig {
    /// Draws from the limit-law samplers used as KS references.
    pub oracle_samples: usize,
    /// Step fraction of the path-constructed waiting-time oracle.
    pub waiting_time_eps: f64,
    /// Absolute floor of the Mittag-Leffler transform band.
    pub transform_floor: f64,
    pub k_se: f64,
}

impl Default for LimitsConfig {
    fn default() -> Self {
        Self {
            oracle_samples: 20_000,
            waiting_time_eps: 1e-3,
            transform_floor: 0.01,
            k_se: 4.0,
        }
    }
}

fn default_replications() -> usize {
    2000
}

fn default_excursions() -> usize {
    100_000
}

fn default_q_grid() -> Vec<f64> {
    vec![0.25, 0.5, 1.0, 2.0, 4.0]
}

fn default_lambda_grid() -> Vec<f64> {
    vec![1e2, 1e3, 1e4]
}

fn default_t_grid() -> Vec<f64> {
    vec![1.0]
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.class_map.check_model(&self.model)?;
        if let Some(map) = &self.structure.oracle_class_map {
            map.check_model(&self.model)?;
        }
        let positive = |name: &str, v: usize| {
            if v == 0 {
                Err(Error::Config(format!("{name} must be positive")))
            } else {
                Ok(())
            }
        };
        positive("replications", self.replications)?;
        positive("n_excursions", self.n_excursions)?;
        positive("simulate.grid_points", self.simulate.grid_points)?;
        positive("structure.route_grid_points", self.structure.route_grid_points)?;
        positive(
            "structure.subordination_replications",
            self.structure.subordination_replications,
        )?;
        positive("structure.windows", self.structure.windows)?;
        positive("limits.oracle_samples", self.limits.oracle_samples)?;
        for (name, grid, allow_zero) in [
            ("q_grid", &self.q_grid, true),
            ("lambda_grid", &self.lambda_grid, false),
            ("t_grid", &self.t_grid, false),
        ] {
            if grid.is_empty() {
                return Err(Error::Config(format!("{name} is empty")));
            }
            if let Some(v) = grid
                .iter()
                .find(|&&v| !(v.is_finite() && (v > 0.0 || (allow_zero && v == 0.0))))
            {
                return Err(Error::Config(format!("{name} entry {v} is not a positive number")));
            }
        }
        let s = &self.structure;
        for (name, v) in [
            ("structure.window_length", s.window_length),
            ("structure.route_tolerance", s.route_tolerance),
            ("structure.k_se", s.k_se),
            ("limits.k_se", self.limits.k_se),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} must be a positive number, got {v}")));
            }
        }
        if !(s.mark_threshold.is_finite() && s.mark_threshold >= 0.0) {
            return Err(Error::Config(format!(
                "structure.mark_threshold must be nonnegative, got {}",
                s.mark_threshold
            )));
        }
        let l = &self.limits;
        if !(l.waiting_time_eps > 0.0 && l.waiting_time_eps < 1.0) {
            return Err(Error::Config(format!(
                "limits.waiting_time_eps must lie in (0, 1), got {}",
                l.waiting_time_eps
            )));
        }
        if !(l.transform_floor.is_finite() && l.transform_floor >= 0.0) {
            return Err(Error::Config(format!(
                "limits.transform_floor must be nonnegative, got {}",
                l.transform_floor
            )));
        }
        Ok(())
    }
}
