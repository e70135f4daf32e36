use std::path::Path;

use serde::{Deserialize, Serialize};

use super::control::{ControlOperator, ControlSpec};
use super::integrable::{IntegrableModel, DEFAULT_MAX_DIM, DEFAULT_RESOLUTION};
use super::system::System;
use crate::error::{Error, Result};

/// JSON model definition. Unknown fields are rejected.
///
/// ```json
/// {
///   "n": 2, "d": 2,
///   "omega": [1.0, 1.618],
///   "kappa": [[0.0, 0.05], [0.05, 0.0]],
///   "e0": 0.0,
///   "control": { "lambda": [1.0, 1.0], "mu": [[0.0, 0.0], [0.0, 0.0]] },
///   "seed": 7
/// }
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub n: usize,
    pub d: usize,
    pub omega: Vec<f64>,
    pub kappa: Vec<Vec<f64>>,
    #[serde(default)]
    pub e0: f64,
    #[serde(default)]
    pub control: ControlSpec,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default = "default_max_dim")]
    pub max_dim: usize,
    #[serde(default = "default_resolution")]
    pub resolution: f64,
}

fn default_max_dim() -> usize {
    DEFAULT_MAX_DIM
}

fn default_resolution() -> f64 {
    DEFAULT_RESOLUTION
}

impl ModelConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn model(&self) -> Result<IntegrableModel> {
        if self.n != self.omega.len() {
            return Err(Error::invalid(
                "n",
                format!("n = {} but omega has {} entries", self.n, self.omega.len()),
            ));
        }
        IntegrableModel::from_parts(
            self.omega.clone(),
            self.kappa.clone(),
            self.d,
            self.e0,
            self.max_dim,
            self.resolution,
        )
    }

    pub fn system(&self) -> Result<System> {
        let model = self.model()?;
        let control = ControlOperator::structured(&model, &self.control)?;
        System::new(model, control)
    }
}
