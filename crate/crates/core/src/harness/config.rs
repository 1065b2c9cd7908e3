use crate::adversary::AdversarySpec;
use crate::protocol::{ProtocolParams, Scenario};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use thiserror::Error;

/// Overrides the master seed of any configuration.
pub const SEED_ENV: &str = "SECMET_SEED";
/// Overrides the worker thread count.
pub const THREADS_ENV: &str = "SECMET_THREADS";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("reading {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("parsing {path}: {source}")]
    Parse { path: PathBuf, source: serde_json::Error },
    #[error("{0}")]
    Invalid(String),
}

/// Tolerances fixed in the configuration before running.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Rates must lie within this many binomial σ of their prediction.
    pub sigma: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { sigma: 4.0 }
    }
}

/// One experiment: `trials` independent protocol runs of `params.nu`
/// rounds each.
///
/// ```json
/// {
///   "name": "two-party basis guess",
///   "scenario": "two_party",
///   "params": { "k": 1, "n_probes": 4, "nu": 1, "p_a": 0.6667, "p_c": 0.5 },
///   "adversary": { "tag": "basis_guess" },
///   "trials": 100000,
///   "seed": 7
/// }
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_name")]
    pub name: String,
    pub scenario: Scenario,
    #[serde(default)]
    pub params: ProtocolParams,
    #[serde(default = "default_adversary")]
    pub adversary: AdversarySpec,
    pub trials: usize,
    /// Master seed; per-trial seeds are derived from it and the trial index.
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    /// Worker threads; `None` lets the pool decide.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// Run the ladder `N = 1, 2, …, params.n_probes` per trial and report
    /// estimation accuracy. Only meaningful for passive runs.
    #[serde(default)]
    pub estimate: bool,
}

fn default_name() -> String {
    "experiment".to_owned()
}

fn default_adversary() -> AdversarySpec {
    AdversarySpec::new(crate::adversary::AdversaryKind::Passive)
}

impl ExperimentConfig {
    pub fn new(name: impl Into<String>, params: ProtocolParams, adversary: AdversarySpec, trials: usize, seed: u64) -> Self {
        Self {
            name: name.into(),
            scenario: params.scenario(),
            params,
            adversary,
            trials,
            seed,
            output: None,
            threads: None,
            tolerances: Tolerances::default(),
            estimate: false,
        }
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_owned(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|source| ConfigError::Parse {
            path: path.to_owned(),
            source,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Applies [`SEED_ENV`] and [`THREADS_ENV`] when set.
    pub fn apply_env(&mut self) -> Result<(), ConfigError> {
        if let Some(seed) = env_number(SEED_ENV)? {
            self.seed = seed;
        }
        if let Some(threads) = env_number(THREADS_ENV)? {
            self.threads = Some(threads as usize);
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.trials == 0 {
            return Err(ConfigError::Invalid("trials must be at least 1".into()));
        }
        if self.params.scenario() != self.scenario {
            return Err(ConfigError::Invalid(format!(
                "scenario {:?} does not match k = {}",
                self.scenario, self.params.k
            )));
        }
        if self.threads == Some(0) {
            return Err(ConfigError::Invalid("threads must be at least 1".into()));
        }
        if self.estimate && !self.params.n_probes.is_power_of_two() {
            return Err(ConfigError::Invalid("estimation ladder needs n_probes a power of two".into()));
        }
        self.params.validate().map_err(|e| ConfigError::Invalid(e.to_string()))
    }
}

/// Reads a numeric environment variable, `None` when unset.
pub fn env_number(name: &str) -> Result<Option<u64>, ConfigError> {
    match std::env::var(name) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| ConfigError::Invalid(format!("{name}={v} is not a non-negative integer"))),
        Err(_) => Ok(None),
    }
}
