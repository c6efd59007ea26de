//! Run configuration: a `key = value` text file plus `--set` overrides.

use std::fmt::Display;
use std::path::{Path, PathBuf};

use momat_core::decisions::DecisionError;
use momat_core::ledger::Endowments;
use momat_core::{EngineKind, Parameters};
use thiserror::Error;

pub const DEFAULT_HORIZON: u64 = 100;

/// Keys accepted besides the model parameters.
pub const EXTRA_KEYS: [&str; 6] = [
    "com_lab_0",
    "com_res_0",
    "horizon",
    "engine",
    "csv_out",
    "json_out",
];

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{origin} line {line}: expected `key = value`, got `{text}`")]
    Syntax {
        origin: String,
        line: usize,
        text: String,
    },
    #[error("{origin} line {line}: `{key}` given twice")]
    Duplicate {
        origin: String,
        line: usize,
        key: String,
    },
    #[error("`--set {0}`: expected key=value")]
    Override(String),
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("{key}: cannot parse `{value}`")]
    Value { key: String, value: String },
    #[error(transparent)]
    Parameter(#[from] DecisionError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: Parameters,
    pub endowments: Endowments,
    pub horizon: u64,
    pub engine: EngineKind,
    pub csv_out: Option<PathBuf>,
    pub json_out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            params: Parameters::default(),
            endowments: Endowments::default(),
            horizon: DEFAULT_HORIZON,
            engine: EngineKind::default(),
            csv_out: None,
            json_out: None,
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value.parse().map_err(|_| ConfigError::Value {
        key: key.into(),
        value: value.into(),
    })
}

impl RunConfig {
    /// Defaults, then the file, then each override in order.
    pub fn load(file: Option<&Path>, overrides: &[String]) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        if let Some(path) = file {
            let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
                path: path.to_path_buf(),
                source,
            })?;
            for (key, value) in parse_lines(&text, &path.display().to_string())? {
                cfg.apply(&key, &value)?;
            }
        }
        for o in overrides {
            let (key, value) = o
                .split_once('=')
                .ok_or_else(|| ConfigError::Override(o.clone()))?;
            cfg.apply(key.trim(), value.trim())?;
        }
        cfg.params.validate()?;
        Ok(cfg)
    }

    pub fn apply(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "com_lab_0" => self.endowments.com_lab = parse(key, value)?,
            "com_res_0" => self.endowments.com_res = parse(key, value)?,
            "horizon" => self.horizon = parse(key, value)?,
            "engine" => self.engine = parse(key, value)?,
            "csv_out" => self.csv_out = Some(PathBuf::from(value)),
            "json_out" => self.json_out = Some(PathBuf::from(value)),
            k if Parameters::KEYS.contains(&k) => {
                let v: f64 = parse(key, value)?;
                if k == "tau" && v.fract() != 0.0 {
                    return Err(ConfigError::Value {
                        key: key.into(),
                        value: value.into(),
                    });
                }
                self.params.set(k, v)?;
            }
            other => return Err(ConfigError::UnknownKey(other.into())),
        }
        Ok(())
    }

    /// Every model input as resolved, in a fixed order. Output paths are
    /// left out since they do not affect the numbers.
    pub fn echo(&self) -> Vec<(String, String)> {
        let mut out: Vec<(String, String)> = Parameters::KEYS
            .iter()
            .map(|&k| {
                (
                    k.to_string(),
                    fmt_value(self.params.get(k).expect("listed key")),
                )
            })
            .collect();
        let mut push = |k: &str, v: &dyn Display| out.push((k.to_string(), v.to_string()));
        push("com_lab_0", &self.endowments.com_lab);
        push("com_res_0", &self.endowments.com_res);
        push("horizon", &self.horizon);
        push("engine", &self.engine.name());
        out
    }
}

fn fmt_value(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        v.to_string()
    }
}

/// Splits config text into key/value pairs. Blank lines and `#` comments
/// are skipped; a key may appear once.
pub fn parse_lines(text: &str, origin: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut pairs: Vec<(String, String)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .filter(|(k, v)| !k.is_empty() && !v.is_empty())
            .ok_or_else(|| ConfigError::Syntax {
                origin: origin.into(),
                line: i + 1,
                text: raw.trim().into(),
            })?;
        if pairs.iter().any(|(k, _)| k == key) {
            return Err(ConfigError::Duplicate {
                origin: origin.into(),
                line: i + 1,
                key: key.into(),
            });
        }
        pairs.push((key.to_string(), value.to_string()));
    }
    Ok(pairs)
}
