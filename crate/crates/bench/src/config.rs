//! Experiment definition: a TOML file plus command-line overrides.

use std::path::{Path, PathBuf};

use mlmc::{Gbm64, MlmcMode, PayoffKind, PayoffSpec64, SchemeKind};
use serde::{Deserialize, Serialize};

use crate::error::BenchError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub mu: f64,
    pub sigma: f64,
    pub x0: f64,
    pub horizon: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self { mu: 0.05, sigma: 0.25, x0: 100.0, horizon: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PayoffConfig {
    pub kind: PayoffKind,
    pub strike: f64,
    pub rate: f64,
    /// Paid by the digital call; ignored otherwise.
    pub cash: f64,
}

impl Default for PayoffConfig {
    fn default() -> Self {
        Self { kind: PayoffKind::Call, strike: 100.0, rate: 0.05, cash: 100.0 }
    }
}

/// Everything that determines a run. Two equal configs give byte-identical
/// reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelConfig,
    pub payoff: PayoffConfig,
    pub scheme: SchemeKind,
    pub refinement_factor: u32,
    /// Strictly decreasing, all positive.
    pub epsilon_list: Vec<f64>,
    pub mode: MlmcMode,
    pub seed: u64,
    pub repetitions: u32,
    /// Directory receiving the CSV and JSON files.
    pub output_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            model: ModelConfig::default(),
            payoff: PayoffConfig::default(),
            scheme: SchemeKind::EulerMaruyama,
            refinement_factor: 2,
            epsilon_list: vec![0.1, 0.05, 0.02, 0.01, 0.005],
            mode: MlmcMode::Adaptive,
            seed: 20080101,
            repetitions: 1,
            output_dir: PathBuf::from("mlmc-out"),
        }
    }
}

/// Command-line values that replace the matching config entries.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub epsilon_list: Option<Vec<f64>>,
    pub payoff: Option<PayoffKind>,
    pub scheme: Option<SchemeKind>,
    pub mode: Option<MlmcMode>,
    pub seed: Option<u64>,
    pub repetitions: Option<u32>,
    pub output_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, BenchError> {
        toml::from_str(text).map_err(|e| BenchError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, BenchError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| BenchError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn apply(&mut self, o: Overrides) {
        if let Some(v) = o.epsilon_list {
            self.epsilon_list = v;
        }
        if let Some(v) = o.payoff {
            self.payoff.kind = v;
        }
        if let Some(v) = o.scheme {
            self.scheme = v;
        }
        if let Some(v) = o.mode {
            self.mode = v;
        }
        if let Some(v) = o.seed {
            self.seed = v;
        }
        if let Some(v) = o.repetitions {
            self.repetitions = v;
        }
        if let Some(v) = o.output_dir {
            self.output_dir = v;
        }
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        let bad = |msg: String| Err(BenchError::Config(msg));
        if self.epsilon_list.is_empty() {
            return bad("epsilon_list is empty".into());
        }
        if let Some(e) = self.epsilon_list.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
            return bad(format!("epsilon_list entries must be positive and finite, got {e}"));
        }
        if self.epsilon_list.windows(2).any(|w| w[0] <= w[1]) {
            return bad(format!("epsilon_list must be strictly decreasing, got {:?}", self.epsilon_list));
        }
        if self.repetitions < 1 {
            return bad("repetitions must be at least 1".into());
        }
        if self.refinement_factor < 2 {
            return bad(format!("refinement_factor must be at least 2, got {}", self.refinement_factor));
        }
        if !(self.model.sigma >= 0.0) || !(self.model.x0 > 0.0) {
            return bad(format!("model needs sigma >= 0 and x0 > 0, got {} and {}", self.model.sigma, self.model.x0));
        }
        let model = self.build_model()?;
        self.scheme.check_admissible(&model).map_err(|e| BenchError::Config(e.to_string()))?;
        self.build_payoff()?;
        Ok(())
    }

    pub fn build_model(&self) -> Result<Gbm64, BenchError> {
        let m = &self.model;
        Gbm64::new(m.mu, m.sigma, m.x0, m.horizon).map_err(|e| BenchError::Config(format!("model: {e}")))
    }

    pub fn build_payoff(&self) -> Result<PayoffSpec64, BenchError> {
        let p = &self.payoff;
        PayoffSpec64::new(p.kind, p.strike, p.rate, self.model.horizon, p.cash)
            .map_err(|e| BenchError::Config(format!("payoff: {e}")))
    }
}

/// Parses a comma-separated tolerance list such as `0.1,0.05`.
pub fn parse_eps_list(text: &str) -> Result<Vec<f64>, BenchError> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| BenchError::Config(format!("bad tolerance {s:?}: {e}")))
        })
        .collect()
}

/// Parses a kebab-case enum name (`digital-call`, `milstein`, `fixed-l`).
pub fn parse_name<T: serde::de::DeserializeOwned>(what: &str, text: &str) -> Result<T, BenchError> {
    serde_json::from_value(serde_json::Value::String(text.to_owned()))
        .map_err(|_| BenchError::Config(format!("unknown {what} {text:?}")))
}
