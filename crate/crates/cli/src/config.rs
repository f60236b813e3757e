//! Run configuration: a JSON file whose values are overridden by flags and
//! completed by defaults.

use std::path::{Path, PathBuf};

use fzwave::kernel::{uniform_grid, QuadratureConfig};
use fzwave::solver::InitialData;
use fzwave::ModelParams;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Model parameters; every field may come from the file or a flag.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub tau: Option<f64>,
    pub epsilon: Option<f64>,
}

impl ModelSection {
    pub fn resolve(&self) -> Result<ModelParams, CliError> {
        let need = |v: Option<f64>, name: &str| v.ok_or_else(|| CliError::Usage(format!("missing model parameter {name}")));
        Ok(ModelParams::new(
            need(self.alpha, "alpha")?,
            need(self.beta, "beta")?,
            need(self.tau, "tau")?,
            self.epsilon.unwrap_or(ModelParams::DEFAULT_EPSILON),
        )?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub t_list: Vec<f64>,
}

impl Default for GridSection {
    fn default() -> Self {
        GridSection {
            x_min: -4.0,
            x_max: 4.0,
            nx: 801,
            t_list: vec![1.0],
        }
    }
}

impl GridSection {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.nx < 3 {
            return Err(CliError::Usage(format!("nx must be >= 3, got {}", self.nx)));
        }
        if !(self.x_min < self.x_max) || !self.x_min.is_finite() || !self.x_max.is_finite() {
            return Err(CliError::Usage(format!(
                "need finite x_min < x_max, got [{}, {}]",
                self.x_min, self.x_max
            )));
        }
        if self.t_list.is_empty() || self.t_list.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
            return Err(CliError::Usage("t_list must be non-empty with finite times > 0".into()));
        }
        if self.t_list.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CliError::Usage("t_list must be strictly increasing".into()));
        }
        Ok(())
    }

    pub fn x_grid(&self) -> Result<Vec<f64>, CliError> {
        self.validate()?;
        Ok(uniform_grid(self.x_min, self.x_max, self.nx)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitialSection {
    pub u0: InitialData,
    pub v0: InitialData,
}

impl Default for InitialSection {
    fn default() -> Self {
        InitialSection {
            u0: InitialData::unit_dirac(),
            v0: InitialData::Zero,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    /// Standard output when absent.
    pub path: Option<PathBuf>,
    pub format: Format,
}

/// Complete description of a run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSection,
    pub quadrature: QuadratureConfig,
    pub grid: GridSection,
    pub initial: InitialSection,
    pub output: OutputSection,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
    }
}
