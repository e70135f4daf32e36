use std::fs;
use std::path::{Path, PathBuf};

use resonant::compiler::{circuit_from_json, ExecutionMode, GateSpec};
use resonant::model::{ModelConfig, System};
use resonant::pulses::{Envelope, PulseSchedule};
use serde::Deserialize;

use crate::error::{CliError, CliResult};

/// Seeds used when neither the config nor `--seed` provides any.
pub const DEFAULT_SEED_COUNT: u64 = 10;

/// JSON experiment description. File paths are resolved relative to the
/// config file; unknown fields are rejected.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Optional; must match the verb when present.
    pub experiment: Option<String>,
    pub model: Option<PathBuf>,
    pub circuit: Option<PathBuf>,
    pub schedule: Option<PathBuf>,
    #[serde(default)]
    pub gamma_eff: Vec<f64>,
    /// Register sizes for integrable sweeps.
    #[serde(default)]
    pub sizes: Vec<usize>,
    /// Matrix dimensions for random-matrix sweeps.
    #[serde(default)]
    pub dims: Vec<usize>,
    #[serde(default)]
    pub seeds: Vec<u64>,
    pub mode: Option<ExecutionMode>,
    pub envelope: Option<Envelope>,
    /// Occupation numbers of the initial basis state (default: ground state).
    pub initial_state: Option<Vec<usize>>,
    /// Number of evenly spaced trajectory samples.
    pub samples: Option<usize>,
    /// Basis indices to export in trajectories (default: all).
    pub watch: Option<Vec<usize>>,
    pub tol: Option<f64>,
    pub kappa_range: Option<(f64, f64)>,
    pub n: Option<usize>,
    pub d: Option<usize>,
    pub goe_dim: Option<usize>,
    pub histogram_bins: Option<usize>,
}

/// A config together with the bytes it was parsed from and its directory.
pub struct LoadedConfig {
    pub config: ExperimentConfig,
    pub bytes: Vec<u8>,
    pub base: PathBuf,
    /// (path, bytes) of every input file read so far.
    pub inputs: Vec<(PathBuf, Vec<u8>)>,
}

pub fn read(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|source| CliError::Input {
        path: path.to_path_buf(),
        source,
    })
}

impl LoadedConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let bytes = read(path)?;
        let config: ExperimentConfig =
            serde_json::from_slice(&bytes).map_err(|e| CliError::config("config", e.to_string()))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(LoadedConfig {
            config,
            bytes,
            base,
            inputs: Vec::new(),
        })
    }

    fn input(&mut self, field: &str, path: &Option<PathBuf>) -> CliResult<String> {
        let rel = path
            .as_ref()
            .ok_or_else(|| CliError::config(field, "required for this experiment"))?;
        let full = self.base.join(rel);
        let bytes = fs::read(&full)
            .map_err(|e| CliError::config(field, format!("cannot read {}: {e}", full.display())))?;
        let text = String::from_utf8(bytes.clone()).map_err(|e| CliError::config(field, e.to_string()))?;
        self.inputs.push((full, bytes));
        Ok(text)
    }

    pub fn system(&mut self) -> CliResult<System> {
        let path = self.config.model.clone();
        let text = self.input("model", &path)?;
        let model = ModelConfig::from_json(&text).map_err(|e| CliError::config("model", e.to_string()))?;
        Ok(model.system()?)
    }

    pub fn circuit(&mut self) -> CliResult<Vec<GateSpec>> {
        let path = self.config.circuit.clone();
        let text = self.input("circuit", &path)?;
        circuit_from_json(&text).map_err(|e| CliError::config("circuit", e.to_string()))
    }

    pub fn schedule(&mut self) -> CliResult<PulseSchedule> {
        let path = self.config.schedule.clone();
        let text = self.input("schedule", &path)?;
        PulseSchedule::from_json(&text).map_err(|e| CliError::config("schedule", e.to_string()))
    }
}

impl ExperimentConfig {
    pub fn check_kind(&self, verb: &str) -> CliResult<()> {
        match &self.experiment {
            Some(kind) if kind != verb => Err(CliError::config(
                "experiment",
                format!("config is for `{kind}` but the `{verb}` verb was invoked"),
            )),
            _ => Ok(()),
        }
    }

    pub fn gamma_list(&self) -> CliResult<&[f64]> {
        if self.gamma_eff.is_empty() {
            return Err(CliError::config("gamma_eff", "sweep list must not be empty"));
        }
        if let Some(g) = self.gamma_eff.iter().find(|g| !(g.is_finite() && **g > 0.0)) {
            return Err(CliError::config("gamma_eff", format!("{g} is not a positive rate")));
        }
        Ok(&self.gamma_eff)
    }

    /// Config seeds, or `count` consecutive seeds from `base` when the
    /// command line overrides them.
    pub fn resolve_seeds(&self, base: Option<u64>) -> Vec<u64> {
        let count = if self.seeds.is_empty() { DEFAULT_SEED_COUNT } else { self.seeds.len() as u64 };
        match base {
            Some(s) => (s..s + count).collect(),
            None if self.seeds.is_empty() => (0..count).collect(),
            None => self.seeds.clone(),
        }
    }
}
