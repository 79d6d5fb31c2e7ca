//! TOML experiment files.
//!
//! ```toml
//! [objective]
//! name = "double-well"        # or: table = "f.csv"
//! params = [0.0, 1.0, 0.25, 0.75, 0.01, 1.0]
//!
//! [sim]
//! lambda = 1.0
//! alpha = 10.0
//! initial_positions = [0.0, 1.0]
//! integrator = "rk4"
//! dt = 1e-3
//! gap_tol = 1e-10
//! t_max = 200.0
//! sample_stride = 1
//!
//! [sweep_alpha]
//! alphas = [10.0, 100.0, 1000.0, 10000.0]
//!
//! [sweep_n]
//! alpha = 5.0
//! width = 1.0
//! ns = [2, 4, 8, 16, 32]
//! j = 1
//!
//! [certify]
//! grid_n = 10000
//! alphas = [1e3, 1e4]
//! ```
//!
//! Relative table paths are resolved against the directory of the config file.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::analysis::certify::DEFAULT_GRID;
use crate::dynamics::{Integrator, SimConfig};
use crate::error::{Error, Result};
use crate::objective::{builtin_objective, table_objective_from_csv, Objective};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub objective: Option<ObjectiveSpec>,
    #[serde(default)]
    pub sim: SimSection,
    pub sweep_alpha: Option<SweepAlphaSection>,
    pub sweep_n: Option<SweepNSection>,
    #[serde(default)]
    pub certify: CertifySection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectiveSpec {
    pub name: Option<String>,
    #[serde(default)]
    pub params: Vec<f64>,
    pub table: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    pub lambda: Option<f64>,
    pub alpha: Option<f64>,
    pub initial_positions: Option<Vec<f64>>,
    pub integrator: Option<String>,
    pub dt: Option<f64>,
    pub gap_tol: Option<f64>,
    pub t_max: Option<f64>,
    pub sample_stride: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAlphaSection {
    pub alphas: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepNSection {
    pub alpha: f64,
    #[serde(default = "one")]
    pub width: f64,
    pub ns: Vec<usize>,
    #[serde(default = "one_usize")]
    pub j: usize,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertifySection {
    pub grid_n: Option<usize>,
    #[serde(default)]
    pub alphas: Vec<f64>,
}

fn one() -> f64 {
    1.0
}

fn one_usize() -> usize {
    1
}

fn prefixed(section: &str, err: Error) -> Error {
    match err {
        Error::InvalidConfig { field, reason } => Error::InvalidConfig {
            field: format!("{section}.{field}"),
            reason,
        },
        other => other,
    }
}

fn strictly_increasing(field: &str, values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::config(field, "grid is empty"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::config(field, "grid values must be finite"));
    }
    if values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::config(field, "grid must be strictly increasing"));
    }
    Ok(())
}

impl ExperimentConfig {
    /// Reads and checks a config file. Table paths are resolved and must exist.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config("--config", format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text)?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        if let Some(table) = cfg.objective.as_mut().and_then(|o| o.table.as_mut()) {
            if table.is_relative() {
                *table = base.join(&*table);
            }
        }
        cfg.check()?;
        Ok(cfg)
    }

    /// Parses config text without touching the file system.
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::config("config", e.message().to_string()))
    }

    /// Structural checks that need no objective.
    pub fn check(&self) -> Result<()> {
        if let Some(spec) = &self.objective {
            match (&spec.name, &spec.table) {
                (None, None) => return Err(Error::config("objective", "need `name` or `table`")),
                (Some(name), Some(_)) if name != "custom-table" => {
                    return Err(Error::config("objective.table", "only valid with name = \"custom-table\""))
                }
                _ => {}
            }
            if let Some(table) = &spec.table {
                if !table.is_file() {
                    return Err(Error::config(
                        "objective.table",
                        format!("file {} does not exist", table.display()),
                    ));
                }
            }
        }
        if let Some(s) = &self.sweep_alpha {
            strictly_increasing("sweep_alpha.alphas", &s.alphas)?;
        }
        if let Some(s) = &self.sweep_n {
            let ns: Vec<f64> = s.ns.iter().map(|&n| n as f64).collect();
            strictly_increasing("sweep_n.ns", &ns)?;
        }
        if !self.certify.alphas.is_empty() {
            strictly_increasing("certify.alphas", &self.certify.alphas)?;
        }
        if self.certify.grid_n.is_some_and(|g| g < 3) {
            return Err(Error::config("certify.grid_n", "need at least 3 grid points"));
        }
        Ok(())
    }

    pub fn build_objective(&self) -> Result<Objective> {
        let spec = self
            .objective
            .as_ref()
            .ok_or_else(|| Error::config("objective", "section is missing"))?;
        match (&spec.table, &spec.name) {
            (Some(path), _) => table_objective_from_csv(path),
            (None, Some(name)) => builtin_objective(name, &spec.params),
            (None, None) => Err(Error::config("objective", "need `name` or `table`")),
        }
    }

    /// Assembles a [`SimConfig`]. Missing `alpha` or `initial_positions` fall
    /// back to the given placeholders when the command does not use them.
    pub fn sim_config(&self, alpha: Option<f64>, positions: Option<Vec<f64>>) -> Result<SimConfig> {
        let s = &self.sim;
        let lambda = s.lambda.unwrap_or(1.0);
        let alpha = s
            .alpha
            .or(alpha)
            .ok_or_else(|| Error::config("sim.alpha", "missing"))?;
        let xs = s
            .initial_positions
            .clone()
            .or(positions)
            .ok_or_else(|| Error::config("sim.initial_positions", "missing"))?;
        let mut cfg = SimConfig::new(lambda, alpha, xs);
        if let Some(name) = &s.integrator {
            cfg.integrator = name.parse::<Integrator>().map_err(|e| prefixed("sim", e))?;
        }
        if let Some(dt) = s.dt {
            cfg.dt = dt;
        }
        if let Some(v) = s.gap_tol {
            cfg.gap_tol = v;
        }
        if let Some(v) = s.t_max {
            cfg.t_max = v;
        }
        if let Some(v) = s.sample_stride {
            cfg.sample_stride = v;
        }
        cfg.validate().map_err(|e| prefixed("sim", e))?;
        Ok(cfg)
    }

    pub fn grid_n(&self) -> usize {
        self.certify.grid_n.unwrap_or(DEFAULT_GRID)
    }
}
