//! Run specifications: which command, over which parameter grid, with which
//! protocol settings.
//!
//! A run is described by an optional TOML file and command-line overrides
//! (flags win). Recognised keys:
//!
//! ```toml
//! n = [8, 16]          # chain lengths
//! p = 0.5              # scalars or lists for every grid axis
//! q = 0.5
//! phi1 = [0.0, 3.141592653589793]
//! phi2 = 0.0
//! xi = [0.1, 0.2, 0.3]
//! delta = 1e-4         # T_irr threshold
//! t_max = 2000         # even
//! stride = 2           # even, >= 2
//! samples = 200        # contraction pairs
//! steps = 10           # oracle-check steps
//! seed = 0
//! jobs = 1
//! out = "results.csv"
//! ```
//!
//! `eta` is never accepted: the damping strength is always `p - q`.

use std::fs;
use std::path::{Path, PathBuf};

use qca_core::metrics::{DEFAULT_DELTA, DEFAULT_STRIDE, DEFAULT_T_MAX};
use qca_core::oracle::MAX_SITES;
use qca_core::{AutomatonConfig, QcaError, RuleParams};
use serde::Deserialize;

use crate::error::{HarnessError, Result};

pub const DEFAULT_SAMPLES: usize = 200;
pub const DEFAULT_ORACLE_STEPS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Curve,
    TirrSweep,
    Contraction,
    FixedPoint,
    OracleCheck,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Curve => "curve",
            Command::TirrSweep => "tirr-sweep",
            Command::Contraction => "contraction",
            Command::FixedPoint => "fixed-point",
            Command::OracleCheck => "oracle-check",
        }
    }
}

/// Axes of the Cartesian parameter grid. Cells are enumerated with `n`
/// outermost and `xi` innermost.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub n: Vec<usize>,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub phi1: Vec<f64>,
    pub phi2: Vec<f64>,
    pub xi: Vec<f64>,
}

impl Default for Grid {
    fn default() -> Self {
        Self {
            n: vec![8],
            p: vec![0.5],
            q: vec![0.5],
            phi1: vec![0.0],
            phi2: vec![0.0],
            xi: vec![0.0],
        }
    }
}

/// One grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub n: usize,
    pub p: f64,
    pub q: f64,
    pub phi1: f64,
    pub phi2: f64,
    pub xi: f64,
}

impl Grid {
    pub fn cells(&self) -> Vec<Cell> {
        let mut out = Vec::new();
        for &n in &self.n {
            for &p in &self.p {
                for &q in &self.q {
                    for &phi1 in &self.phi1 {
                        for &phi2 in &self.phi2 {
                            for &xi in &self.xi {
                                out.push(Cell {
                                    n,
                                    p,
                                    q,
                                    phi1,
                                    phi2,
                                    xi,
                                });
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

impl Cell {
    pub fn config(&self) -> std::result::Result<AutomatonConfig, QcaError> {
        let rule = RuleParams::new(self.p, self.q, self.phi1, self.phi2)?;
        AutomatonConfig::new(self.n, rule, self.xi)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub command: Command,
    pub grid: Grid,
    pub delta: f64,
    pub t_max: u64,
    pub stride: u64,
    pub samples: usize,
    pub steps: usize,
    pub output_path: PathBuf,
    pub seed: u64,
    pub jobs: usize,
}

impl RunSpec {
    pub fn new(command: Command, output_path: impl Into<PathBuf>) -> Self {
        Self {
            command,
            grid: Grid::default(),
            delta: DEFAULT_DELTA,
            t_max: DEFAULT_T_MAX,
            stride: DEFAULT_STRIDE,
            samples: DEFAULT_SAMPLES,
            steps: DEFAULT_ORACLE_STEPS,
            output_path: output_path.into(),
            seed: 0,
            jobs: 1,
        }
    }

    /// Checks every field and every grid cell, returning the cells' configs
    /// in grid order.
    pub fn validate(&self) -> Result<Vec<(Cell, AutomatonConfig)>> {
        let g = &self.grid;
        for (name, empty) in [
            ("n", g.n.is_empty()),
            ("p", g.p.is_empty()),
            ("q", g.q.is_empty()),
            ("phi1", g.phi1.is_empty()),
            ("phi2", g.phi2.is_empty()),
            ("xi", g.xi.is_empty()),
        ] {
            if empty {
                return invalid(format!("field `{name}`: grid axis is empty"));
            }
        }
        if let Some(n) = g.n.iter().find(|&&n| n < 2) {
            return invalid(format!("field `n`: chain length {n} is below 2"));
        }
        if self.command == Command::OracleCheck {
            if let Some(n) = g.n.iter().find(|&&n| n > MAX_SITES) {
                return invalid(format!(
                    "field `n`: oracle-check supports at most {MAX_SITES} sites, got {n}"
                ));
            }
        }
        check_unit("p", &g.p)?;
        check_unit("q", &g.q)?;
        check_unit("xi", &g.xi)?;
        for (name, axis) in [("phi1", &g.phi1), ("phi2", &g.phi2)] {
            if let Some(v) = axis.iter().find(|v| !v.is_finite()) {
                return invalid(format!("field `{name}`: phase {v} is not finite"));
            }
        }
        if !self.delta.is_finite() || self.delta <= 0.0 {
            return invalid(format!("field `delta`: {} must be positive", self.delta));
        }
        if !self.t_max.is_multiple_of(2) {
            return invalid(format!("field `t_max`: {} must be even", self.t_max));
        }
        if self.stride < 2 || !self.stride.is_multiple_of(2) {
            return invalid(format!(
                "field `stride`: {} must be even and at least 2",
                self.stride
            ));
        }
        if self.samples == 0 {
            return invalid("field `samples`: must be at least 1");
        }
        if self.steps == 0 {
            return invalid("field `steps`: must be at least 1");
        }
        if self.jobs == 0 {
            return invalid("field `jobs`: must be at least 1");
        }
        if self.output_path.as_os_str().is_empty() {
            return invalid("field `out`: no output path given");
        }
        g.cells()
            .into_iter()
            .map(|cell| match cell.config() {
                Ok(cfg) => Ok((cell, cfg)),
                Err(QcaError::DegenerateRule { p, q }) => invalid(format!(
                    "fields `p`/`q`: p={p}, q={q} makes the block-unitary normalization \
                     1/sqrt(1 - p + q) vanish (degenerate rule)"
                )),
                Err(e) => invalid(format!("grid cell {cell:?}: {e}")),
            })
            .collect()
    }
}

fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(HarnessError::Validation(msg.into()))
}

fn check_unit(name: &str, axis: &[f64]) -> Result<()> {
    if let Some(v) = axis.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return invalid(format!("field `{name}`: {v} outside [0, 1]"));
    }
    Ok(())
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T> OneOrMany<T> {
    fn into_vec(self) -> Vec<T> {
        match self {
            OneOrMany::One(v) => vec![v],
            OneOrMany::Many(v) => v,
        }
    }
}

/// Contents of a config file. Every key is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    n: Option<OneOrMany<usize>>,
    p: Option<OneOrMany<f64>>,
    q: Option<OneOrMany<f64>>,
    phi1: Option<OneOrMany<f64>>,
    phi2: Option<OneOrMany<f64>>,
    xi: Option<OneOrMany<f64>>,
    eta: Option<toml::Value>,
    delta: Option<f64>,
    t_max: Option<u64>,
    stride: Option<u64>,
    samples: Option<usize>,
    steps: Option<usize>,
    seed: Option<u64>,
    jobs: Option<usize>,
    out: Option<PathBuf>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: ConfigFile = toml::from_str(text)
            .map_err(|e| HarnessError::Validation(format!("config file: {e}")))?;
        if cfg.eta.is_some() {
            return invalid(
                "field `eta`: damping is derived as p - q; decoupled noise is not \
                 allowed in reproduction runs",
            );
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::parse(&text)
    }

    /// Writes every key present in the file into `spec`.
    pub fn apply(self, spec: &mut RunSpec) {
        let g = &mut spec.grid;
        if let Some(v) = self.n {
            g.n = v.into_vec();
        }
        if let Some(v) = self.p {
            g.p = v.into_vec();
        }
        if let Some(v) = self.q {
            g.q = v.into_vec();
        }
        if let Some(v) = self.phi1 {
            g.phi1 = v.into_vec();
        }
        if let Some(v) = self.phi2 {
            g.phi2 = v.into_vec();
        }
        if let Some(v) = self.xi {
            g.xi = v.into_vec();
        }
        if let Some(v) = self.delta {
            spec.delta = v;
        }
        if let Some(v) = self.t_max {
            spec.t_max = v;
        }
        if let Some(v) = self.stride {
            spec.stride = v;
        }
        if let Some(v) = self.samples {
            spec.samples = v;
        }
        if let Some(v) = self.steps {
            spec.steps = v;
        }
        if let Some(v) = self.seed {
            spec.seed = v;
        }
        if let Some(v) = self.jobs {
            spec.jobs = v;
        }
        if let Some(v) = self.out {
            spec.output_path = v;
        }
    }
}
