//! Campaign configuration files.
//!
//! The format is flat `key = value` text; `#` starts a comment, blank lines are ignored.
//!
//! ```text
//! circuit = circuits/honest.qc
//! seed = 42
//! epsilon = 0.005
//! eta = 0.005
//! delta = 0.025
//! fault = gadget_coin_bias 0.1
//! extra_check_lines = 2
//! output_dir = reports
//! ```
//!
//! Relative paths are resolved against the directory holding the config file.

use std::path::{Path, PathBuf};

use crate::protocol::{VerifyParams, DEFAULT_EXTRA_CHECK_LINES};
use crate::prover::{FaultModel, FaultSpecError};

/// Environment variable naming the default report directory.
pub const OUTPUT_DIR_ENV: &str = "GADGETCHECK_OUTPUT_DIR";

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key `{key}` given twice")]
    DuplicateKey { line: usize, key: String },
    #[error("line {line}: bad value for `{key}`: {reason}")]
    Value {
        line: usize,
        key: String,
        reason: String,
    },
    #[error("line {line}: {source}")]
    Fault {
        line: usize,
        source: FaultSpecError,
    },
    #[error("missing required key `circuit`")]
    MissingCircuit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignConfig {
    pub circuit_path: PathBuf,
    pub seed: u64,
    pub epsilon: f64,
    pub eta: f64,
    pub delta: f64,
    pub fault: FaultModel,
    pub extra_check_lines: usize,
    /// Explicit report directory; `None` falls back to [`OUTPUT_DIR_ENV`], then the config's directory.
    pub output_dir: Option<PathBuf>,
}

impl CampaignConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().unwrap_or(Path::new(""));
        Self::parse(&text, base)
    }

    /// Parse config text, resolving relative paths against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self, ConfigError> {
        let defaults = VerifyParams::default();
        let mut circuit_path = None;
        let mut cfg = CampaignConfig {
            circuit_path: PathBuf::new(),
            seed: defaults.seed,
            epsilon: defaults.epsilon,
            eta: defaults.eta,
            delta: defaults.delta,
            fault: FaultModel::Ideal,
            extra_check_lines: DEFAULT_EXTRA_CHECK_LINES,
            output_dir: None,
        };
        let mut seen: Vec<String> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .map(|(k, v)| (k.trim().to_ascii_lowercase(), v.trim()))
                .ok_or(ConfigError::Syntax { line })?;
            if key.is_empty() || value.is_empty() {
                return Err(ConfigError::Syntax { line });
            }
            if seen.contains(&key) {
                return Err(ConfigError::DuplicateKey { line, key });
            }
            let bad = |reason: String| ConfigError::Value {
                line,
                key: key.clone(),
                reason,
            };
            match key.as_str() {
                "circuit" => circuit_path = Some(base.join(value)),
                "seed" => cfg.seed = value.parse().map_err(|e| bad(format!("{e}")))?,
                "epsilon" | "eta" | "delta" => {
                    let v: f64 = value.parse().map_err(|e| bad(format!("{e}")))?;
                    if !(v > 0.0 && v < 1.0) {
                        return Err(bad(format!("{v} is outside (0, 1)")));
                    }
                    match key.as_str() {
                        "epsilon" => cfg.epsilon = v,
                        "eta" => cfg.eta = v,
                        _ => cfg.delta = v,
                    }
                }
                "fault" => {
                    cfg.fault = value
                        .parse()
                        .map_err(|source| ConfigError::Fault { line, source })?
                }
                "extra_check_lines" => {
                    cfg.extra_check_lines = value.parse().map_err(|e| bad(format!("{e}")))?
                }
                "output_dir" => cfg.output_dir = Some(base.join(value)),
                _ => return Err(ConfigError::UnknownKey { line, key }),
            }
            seen.push(key);
        }
        cfg.circuit_path = circuit_path.ok_or(ConfigError::MissingCircuit)?;
        Ok(cfg)
    }

    pub fn verify_params(&self) -> VerifyParams {
        VerifyParams {
            seed: self.seed,
            epsilon: self.epsilon,
            eta: self.eta,
            delta: self.delta,
            extra_check_lines: self.extra_check_lines,
            ..VerifyParams::default()
        }
    }

    /// Report directory: explicit setting, else the environment variable, else `fallback`.
    pub fn resolve_output_dir(&self, fallback: &Path) -> PathBuf {
        if let Some(d) = &self.output_dir {
            return d.clone();
        }
        match std::env::var_os(OUTPUT_DIR_ENV) {
            Some(v) if !v.is_empty() => PathBuf::from(v),
            _ => fallback.to_path_buf(),
        }
    }
}
