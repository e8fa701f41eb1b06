use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// Settings for the phase-damping Monte Carlo sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub samples: usize,
    pub damping_rates: Vec<f64>,
    pub seed: u64,
    pub dims: (usize, usize),
    pub output_path: PathBuf,
    pub emit_plot: bool,
    /// Where the SVG goes; defaults to `output_path` with an `.svg` extension.
    pub plot_path: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            samples: 200_000,
            damping_rates: vec![0.1, 0.3, 0.5, 0.7, 0.9],
            seed: 0,
            dims: (2, 2),
            output_path: PathBuf::from("fig1.csv"),
            emit_plot: false,
            plot_path: None,
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| LabError::Read {
            path: path.to_owned(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|source| LabError::Parse {
            path: path.to_owned(),
            source,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(LabError::InvalidConfig {
                field: "samples",
                reason: "must be at least 1".into(),
            });
        }
        if self.damping_rates.is_empty() {
            return Err(LabError::InvalidConfig {
                field: "damping_rates",
                reason: "must not be empty".into(),
            });
        }
        if let Some(r) = self
            .damping_rates
            .iter()
            .find(|r| !(0.0..=1.0).contains(*r))
        {
            return Err(LabError::InvalidConfig {
                field: "damping_rates",
                reason: format!("{r} is outside [0, 1]"),
            });
        }
        if self.dims != (2, 2) {
            return Err(LabError::InvalidConfig {
                field: "dims",
                reason: format!(
                    "the sweep compares against the two-qubit factorization law; got {}x{}",
                    self.dims.0, self.dims.1
                ),
            });
        }
        Ok(())
    }

    pub fn resolved_plot_path(&self) -> Option<PathBuf> {
        self.emit_plot.then(|| {
            self.plot_path
                .clone()
                .unwrap_or_else(|| self.output_path.with_extension("svg"))
        })
    }
}
