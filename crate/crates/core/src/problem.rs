//! JSON description of a problem `(u, p, α)` and of a run.

use serde::{Deserialize, Serialize};
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::numerics::{RealFunction, SymmetricKGrid, UniformGrid};
use crate::phase::InverseOptions;
use crate::scatdata::ScatConfig;
use crate::transform::SchrodingerProblem;

pub const DEFAULT_X_MAX: f64 = 16.0;
pub const DEFAULT_N_X: usize = 2048;
pub const DEFAULT_K_MAX: f64 = 64.0;
pub const DEFAULT_N_K: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub x_max: f64,
    pub n: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { x_max: DEFAULT_X_MAX, n: DEFAULT_N_X }
    }
}

/// A real profile on the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum ProfileSpec {
    #[default]
    Zero,
    /// `amplitude · exp(−((x − center)/width)²)`.
    Gaussian { amplitude: f64, center: f64, width: f64 },
    /// `height` on `[from, to]`, zero elsewhere.
    Step { height: f64, from: f64, to: f64 },
    /// Values at the grid nodes.
    Samples { values: Vec<f64> },
}

impl ProfileSpec {
    pub fn sample(&self, grid: UniformGrid) -> Result<RealFunction> {
        match self {
            ProfileSpec::Zero => Ok(RealFunction::zeros(grid)),
            ProfileSpec::Gaussian { amplitude, center, width } => {
                if !(*width > 0.0) {
                    return Err(Error::Parse(format!("gaussian width must be positive, got {width}")));
                }
                RealFunction::new(grid, grid.nodes().map(|x| amplitude * (-((x - center) / width).powi(2)).exp()).collect())
            }
            ProfileSpec::Step { height, from, to } => {
                RealFunction::new(grid, grid.nodes().map(|x| if x >= *from && x <= *to { *height } else { 0.0 }).collect())
            }
            ProfileSpec::Samples { values } => RealFunction::new(grid, values.clone()),
        }
        .map_err(|e| match e {
            Error::Domain(m) => Error::Parse(m),
            other => other,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default)]
pub struct ProblemSpec {
    pub grid: GridSpec,
    pub u: ProfileSpec,
    pub p: ProfileSpec,
    pub alpha: f64,
}

impl ProblemSpec {
    pub fn build(&self) -> Result<SchrodingerProblem> {
        let grid = UniformGrid::new(self.grid.x_max, self.grid.n).map_err(|e| Error::Parse(e.to_string()))?;
        if !(0.0..std::f64::consts::PI).contains(&self.alpha) {
            return Err(Error::Parse(format!("alpha must lie in [0, π), got {}", self.alpha)));
        }
        SchrodingerProblem::new(self.u.sample(grid)?, self.p.sample(grid)?, self.alpha)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Relative `L²` error admitted for `u` and `p` in a round trip.
    pub roundtrip: f64,
    /// Admitted `|Δα| mod π` in a round trip.
    pub alpha: f64,
    pub unimodularity: f64,
    pub tail_spread: f64,
    pub limit_gap: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        let s = ScatConfig::default();
        Self {
            roundtrip: 5e-2,
            alpha: 1e-3,
            unimodularity: s.unimodularity_tol,
            tail_spread: s.spread_tol,
            limit_gap: s.limit_gap_tol,
        }
    }
}

/// Contents of a configuration file: a problem plus run settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    #[serde(flatten)]
    pub problem: ProblemSpec,
    pub k_max: f64,
    pub n_k: usize,
    pub tolerances: Tolerances,
    pub inverse: InverseOptions,
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            problem: ProblemSpec::default(),
            k_max: DEFAULT_K_MAX,
            n_k: DEFAULT_N_K,
            tolerances: Tolerances::default(),
            inverse: InverseOptions::default(),
            output: None,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn x_grid(&self) -> Result<UniformGrid> {
        UniformGrid::new(self.problem.grid.x_max, self.problem.grid.n).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn k_grid(&self) -> Result<SymmetricKGrid> {
        SymmetricKGrid::new(self.k_max, self.n_k).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn scat_config(&self) -> ScatConfig {
        ScatConfig {
            unimodularity_tol: self.tolerances.unimodularity,
            spread_tol: self.tolerances.tail_spread,
            limit_gap_tol: self.tolerances.limit_gap,
            zeta_max: self.problem.grid.x_max,
            ..ScatConfig::default()
        }
    }

    /// Checks every field that can be checked without running a solver.
    pub fn validate(&self) -> Result<()> {
        self.problem.build()?;
        self.k_grid()?;
        Ok(())
    }
}
