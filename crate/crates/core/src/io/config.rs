//! `key = value` run configuration.

use std::path::{Path, PathBuf};

use crate::amr::BENCHMARK_NAMES;
use crate::error::{Error, Result};
use crate::estimators::EstimatorKind;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub benchmark: String,
    pub estimator: EstimatorKind,
    /// Dörfler parameter in `(0, 1]`.
    pub theta: f64,
    /// Replaces the tolerance of the benchmark's stopping rule.
    pub tol: Option<f64>,
    pub max_dof: usize,
    pub max_levels: usize,
    pub out: PathBuf,
    /// Relative residual target of the iterative solver.
    pub solver_tol: f64,
    /// Element quadrature order for the energy error.
    pub quadrature_order: Option<usize>,
    /// Initial mesh replacing the benchmark's own.
    pub mesh: Option<PathBuf>,
    /// Write a VTK file per level.
    pub vtk: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            benchmark: "manufactured_cube".into(),
            estimator: EstimatorKind::Recovery,
            theta: 0.2,
            tol: None,
            max_dof: 200_000,
            max_levels: 100,
            out: PathBuf::from("out"),
            solver_tol: 1e-10,
            quadrature_order: None,
            mesh: None,
            vtk: true,
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> std::result::Result<T, String> {
    value.parse().map_err(|_| format!("invalid value '{value}' for {key}"))
}

impl RunConfig {
    /// Set one option from its textual form.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        match key {
            "benchmark" => self.benchmark = value.to_string(),
            "estimator" => {
                self.estimator = EstimatorKind::parse(value).ok_or_else(|| format!("unknown estimator '{value}'"))?
            }
            "theta" => self.theta = parse_num(key, value)?,
            "tol" => self.tol = Some(parse_num(key, value)?),
            "max_dof" => self.max_dof = parse_num(key, value)?,
            "max_levels" => self.max_levels = parse_num(key, value)?,
            "out" => self.out = PathBuf::from(value),
            "solver_tol" => self.solver_tol = parse_num(key, value)?,
            "quadrature_order" => self.quadrature_order = Some(parse_num(key, value)?),
            "mesh" => self.mesh = Some(PathBuf::from(value)),
            "vtk" => self.vtk = parse_num(key, value)?,
            _ => return Err(format!("unknown key '{key}'")),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if !BENCHMARK_NAMES.contains(&self.benchmark.as_str()) {
            return Err(Error::Config(format!(
                "unknown benchmark '{}' (expected one of {})",
                self.benchmark,
                BENCHMARK_NAMES.join(", ")
            )));
        }
        if !(self.theta > 0.0 && self.theta <= 1.0) {
            return Err(Error::Config(format!("theta = {} is outside (0, 1]", self.theta)));
        }
        if let Some(t) = self.tol {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::Config(format!("tol = {t} must be positive")));
            }
        }
        if !(self.solver_tol.is_finite() && self.solver_tol > 0.0) {
            return Err(Error::Config(format!("solver_tol = {} must be positive", self.solver_tol)));
        }
        if self.max_dof == 0 || self.max_levels == 0 {
            return Err(Error::Config("max_dof and max_levels must be positive".into()));
        }
        Ok(())
    }
}

/// Parse `key = value` lines on top of the defaults. Blank lines and `#`
/// comments are skipped.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: i + 1,
            msg: format!("expected key = value, found '{line}'"),
        })?;
        cfg.set(key.trim(), value.trim())
            .map_err(|msg| Error::Parse { line: i + 1, msg })?;
    }
    Ok(cfg)
}

pub fn read_config(path: impl AsRef<Path>) -> Result<RunConfig> {
    parse_config(&std::fs::read_to_string(path)?)
}
