//! Run configuration file. Augmentation settings resolve in three layers:
//! built-in defaults, then the file's `augment` object, then the overrides
//! carried by each schedule entry. Command-line flags replace the
//! top-level fields.

use std::fs;
use std::path::{Path, PathBuf};

use monoaug_core::augment::{AugmentConfig, OpKind};
use monoaug_core::eval::{ClassThresholds, DifficultyRule, EvalConfig, Interpolation};
use serde::Deserialize;
use serde_json::{Map, Value};

use crate::pipeline::ScheduleEntry;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("config {path}: {source}")]
    Parse {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("{0}")]
    Invalid(String),
}

/// Unknown keys surface when the overrides are resolved.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct ScheduleSpec {
    pub op: String,
    /// Partial augmentation settings, same shape as the top-level `augment`.
    #[serde(flatten)]
    pub overrides: Map<String, Value>,
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalSettings {
    /// Partial per-class thresholds over the defaults.
    pub thresholds: Option<Map<String, Value>>,
    pub interpolation: Option<Interpolation>,
    pub rules: Option<Vec<DifficultyRule>>,
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub split: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub augment: Map<String, Value>,
    pub schedule: Vec<ScheduleSpec>,
    pub eval: EvalSettings,
}

/// Recursively overlay `top` onto `base`; objects merge key by key, any
/// other value replaces.
pub fn deep_merge(base: &mut Value, top: &Value) {
    match (base, top) {
        (Value::Object(b), Value::Object(t)) => {
            for (k, v) in t {
                match b.get_mut(k) {
                    Some(slot) => deep_merge(slot, v),
                    None => {
                        b.insert(k.clone(), v.clone());
                    }
                }
            }
        }
        (slot, v) => *slot = v.clone(),
    }
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

fn overlay<T>(defaults: &T, layers: &[&Map<String, Value>], what: &str) -> Result<T, ConfigError>
where
    T: serde::Serialize + serde::de::DeserializeOwned,
{
    let mut value = serde_json::to_value(defaults).expect("defaults serialize");
    for layer in layers {
        deep_merge(&mut value, &Value::Object((*layer).clone()));
    }
    serde_json::from_value(value).map_err(|e| invalid(format!("{what}: {e}")))
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|e| ConfigError::Read {
            path: path.to_owned(),
            source: e,
        })?;
        serde_json::from_str(&text).map_err(|e| ConfigError::Parse {
            path: path.to_owned(),
            source: e,
        })
    }

    /// Defaults overlaid with the file's `augment` object.
    pub fn base_augment(&self) -> Result<AugmentConfig, ConfigError> {
        let cfg: AugmentConfig = overlay(&AugmentConfig::default(), &[&self.augment], "augment")?;
        cfg.validate()
            .map_err(|e| invalid(format!("augment: {e}")))?;
        Ok(cfg)
    }

    /// Resolve every entry. The base settings are validated even when the
    /// schedule is empty.
    pub fn resolve_schedule(&self) -> Result<Vec<ScheduleEntry>, ConfigError> {
        self.base_augment()?;
        self.schedule
            .iter()
            .enumerate()
            .map(|(i, spec)| {
                let op: OpKind = spec
                    .op
                    .parse()
                    .map_err(|e| invalid(format!("schedule[{i}]: {e}")))?;
                let what = format!("schedule[{i}]");
                let config: AugmentConfig = overlay(
                    &AugmentConfig::default(),
                    &[&self.augment, &spec.overrides],
                    &what,
                )?;
                config
                    .validate()
                    .map_err(|e| invalid(format!("{what}: {e}")))?;
                Ok(ScheduleEntry { op, config })
            })
            .collect()
    }

    /// Settings for a single `op`: those of its first schedule entry, else
    /// the base settings.
    pub fn augment_for(&self, op: OpKind) -> Result<AugmentConfig, ConfigError> {
        let schedule = self.resolve_schedule()?;
        match schedule.into_iter().find(|e| e.op == op) {
            Some(e) => Ok(e.config),
            None => self.base_augment(),
        }
    }

    pub fn eval_config(&self) -> Result<EvalConfig, ConfigError> {
        let mut cfg = EvalConfig::default();
        if let Some(t) = &self.eval.thresholds {
            let t: ClassThresholds = overlay(&ClassThresholds::default(), &[t], "eval.thresholds")?;
            check_thresholds(&t)?;
            cfg.thresholds = vec![t];
        }
        if let Some(i) = self.eval.interpolation {
            cfg.interpolation = i;
        }
        if let Some(rules) = &self.eval.rules {
            if rules.is_empty() {
                return Err(invalid("eval.rules: empty"));
            }
            cfg.rules = rules.clone();
        }
        Ok(cfg)
    }
}

pub fn check_thresholds(t: &ClassThresholds) -> Result<(), ConfigError> {
    for v in [t.car, t.pedestrian, t.cyclist] {
        if !(v > 0.0 && v <= 1.0) {
            return Err(invalid(format!("IoU threshold {v} outside (0, 1]")));
        }
    }
    Ok(())
}
