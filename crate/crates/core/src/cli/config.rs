//! Run configuration files (TOML).
//!
//! ```toml
//! scenario = "one_class"
//! V = [0, 0.05, 0.3, 1, 3]
//! frames = 1000000
//! seed = 1
//! out = "runs"
//! emit = "both"
//! ```
//!
//! An inline scenario replaces `scenario` with an `[inline]` table holding a
//! `controller` and one of `task`, `attributes` or `lfp`.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::controllers::ControllerConfig;
use crate::lfp::ConstrainedLfpInstance;
use crate::model::{build_task_model, AttributeModel, AttributeSpec, TaskSpec};
use crate::sim::{
    builtin_scenario, scenario_names, ControllerKind, RateChange, Scenario, ScenarioModel, DEFAULT_HORIZON,
    DEFAULT_SEED, DEFAULT_WINDOW,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("config syntax error: {0}")]
    Syntax(String),
    #[error("config field `{path}`: {message}")]
    Schema { path: String, message: String },
    #[error("unknown scenario `{name}` (available: {available})")]
    UnknownScenario { name: String, available: String },
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Emit {
    #[default]
    Summary,
    Trace,
    Both,
}

impl Emit {
    pub fn summary(self) -> bool {
        matches!(self, Emit::Summary | Emit::Both)
    }

    pub fn trace(self) -> bool {
        matches!(self, Emit::Trace | Emit::Both)
    }
}

/// Scenario defined directly in the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlineScenario {
    #[serde(default = "inline_name")]
    pub name: String,
    pub controller: ControllerKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub task: Option<TaskSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attributes: Option<AttributeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lfp: Option<ConstrainedLfpInstance>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub weights: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power_budget: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate_target: Option<f64>,
    #[serde(default)]
    pub additive_slack: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rate_schedule: Vec<RateChange>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_window: Option<usize>,
}

fn inline_name() -> String {
    "inline".into()
}

fn default_frames() -> u64 {
    DEFAULT_HORIZON
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

fn default_window() -> u64 {
    DEFAULT_WINDOW
}

fn default_jobs() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<String>,
    #[serde(rename = "V", alias = "v")]
    pub v: Vec<f64>,
    #[serde(default = "default_frames")]
    pub frames: u64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub emit: Emit,
    #[serde(default = "default_window")]
    pub window: u64,
    #[serde(default = "default_jobs")]
    pub jobs: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inline: Option<InlineScenario>,
}

impl RunConfig {
    pub fn for_scenario(name: &str, v: Vec<f64>) -> Self {
        Self {
            scenario: Some(name.into()),
            v,
            frames: DEFAULT_HORIZON,
            seed: DEFAULT_SEED,
            out: None,
            emit: Emit::Summary,
            window: DEFAULT_WINDOW,
            jobs: 1,
            inline: None,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.v.is_empty() {
            return Err(ConfigError::Invalid("V list must not be empty".into()));
        }
        if let Some(v) = self.v.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(ConfigError::Invalid(format!(
                "V values must be finite and non-negative, got {v}"
            )));
        }
        if self.frames == 0 {
            return Err(ConfigError::Invalid("frames must be at least 1".into()));
        }
        if self.window == 0 {
            return Err(ConfigError::Invalid("window must be at least 1".into()));
        }
        if self.jobs == 0 {
            return Err(ConfigError::Invalid("jobs must be at least 1".into()));
        }
        match (&self.scenario, &self.inline) {
            (Some(_), Some(_)) => Err(ConfigError::Invalid(
                "give either `scenario` or `[inline]`, not both".into(),
            )),
            (None, None) => Err(ConfigError::Invalid(
                "missing `scenario` name or `[inline]` table".into(),
            )),
            _ => self.base_scenario().map(|_| ()),
        }
    }

    /// The scenario before V, horizon, seed and window are applied.
    pub fn base_scenario(&self) -> Result<Scenario, ConfigError> {
        if let Some(name) = &self.scenario {
            return builtin_scenario(name).ok_or_else(|| ConfigError::UnknownScenario {
                name: name.clone(),
                available: scenario_names().join(", "),
            });
        }
        let inline = self
            .inline
            .as_ref()
            .ok_or_else(|| ConfigError::Invalid("missing scenario".into()))?;
        inline.build(self.frames)
    }

    /// One scenario per V value, in config order.
    pub fn scenarios(&self) -> Result<Vec<Scenario>, ConfigError> {
        let base = self.base_scenario()?;
        let runs = self
            .v
            .iter()
            .map(|&v| {
                base.clone()
                    .with_v(v)
                    .with_horizon(self.frames)
                    .with_seed(self.seed)
                    .with_window(self.window)
            })
            .collect::<Vec<_>>();
        for s in &runs {
            s.validate()
                .map_err(|e| ConfigError::Invalid(format!("{}: {e}", s.name)))?;
        }
        Ok(runs)
    }
}

impl InlineScenario {
    fn build(&self, horizon: u64) -> Result<Scenario, ConfigError> {
        let invalid = |e: String| ConfigError::Invalid(format!("inline scenario: {e}"));
        let model = match (&self.task, &self.attributes, &self.lfp) {
            (Some(t), None, None) => ScenarioModel::Task(build_task_model(t).map_err(|e| invalid(e.to_string()))?),
            (None, Some(a), None) => {
                ScenarioModel::Attribute(AttributeModel::new(a.clone()).map_err(|e| invalid(e.to_string()))?)
            }
            (None, None, Some(l)) => ScenarioModel::Lfp(l.clone()),
            _ => return Err(invalid("exactly one of `task`, `attributes`, `lfp` is required".into())),
        };
        let config = ControllerConfig {
            additive_slack: self.additive_slack,
            weights: self.weights.clone(),
            power_budget: self.power_budget,
            rate_target: self.rate_target,
            ..ControllerConfig::default()
        };
        let mut s = Scenario::new(self.name.clone(), model, self.controller)
            .with_config(config)
            .with_rate_schedule(self.rate_schedule.clone());
        s.horizon = horizon;
        s.theta_window = self.theta_window;
        Ok(s)
    }
}

/// Parses and validates a config file.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let cfg = parse_config_unvalidated(text)?;
    cfg.validate()?;
    Ok(cfg)
}

/// Parses without the semantic checks, so overrides can be applied first.
pub fn parse_config_unvalidated(text: &str) -> Result<RunConfig, ConfigError> {
    let de = toml::Deserializer::parse(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;
    serde_path_to_error::deserialize(de).map_err(|e| ConfigError::Schema {
        path: e.path().to_string(),
        message: e.inner().message().to_string(),
    })
}

pub fn serialize_config(cfg: &RunConfig) -> Result<String, ConfigError> {
    toml::to_string(cfg).map_err(|e| ConfigError::Invalid(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_defaults() {
        let cfg = parse_config("scenario = \"one_class\"\nV = [1]\n").unwrap();
        assert_eq!(cfg.frames, 1_000_000);
        assert_eq!(cfg.seed, 1);
        assert_eq!(cfg.emit, Emit::Summary);
    }

    #[test]
    fn sweep_yields_one_run_per_v() {
        let cfg = parse_config("scenario = \"ten_class\"\nV = [0, 0.05, 0.3, 1, 3]\n").unwrap();
        let runs = cfg.scenarios().unwrap();
        assert_eq!(runs.len(), 5);
        assert_eq!(runs[2].config.v, 0.3);
    }

    #[test]
    fn malformed_number_names_field() {
        let err = parse_config("scenario = \"one_class\"\nV = [1]\nframes = \"many\"\n").unwrap_err();
        match err {
            ConfigError::Schema { path, .. } => assert_eq!(path, "frames"),
            other => panic!("unexpected {other:?}"),
        }
        let err = parse_config(
            "V = [1]\n[inline]\ncontroller = \"task_scheduler\"\n[inline.task]\nmean_energy = [[1.0]]\nmean_duration = [[\"x\"]]\nidle_max = 1\n",
        )
        .unwrap_err();
        match err {
            ConfigError::Schema { path, .. } => assert!(path.starts_with("inline.task.mean_duration"), "{path}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_scenario_rejected() {
        assert!(matches!(
            parse_config("scenario = \"nope\"\nV = [1]\n"),
            Err(ConfigError::UnknownScenario { .. })
        ));
        assert!(matches!(
            parse_config("scenario = \"one_class\"\nV = []\n"),
            Err(ConfigError::Invalid(_))
        ));
    }

    #[test]
    fn inline_task_scenario() {
        let text = r#"
V = [1, 2]
frames = 50
[inline]
name = "tiny"
controller = "task_scheduler"
[inline.task]
mean_energy = [[1.0, 3.0]]
mean_duration = [[7.0, 4.0]]
idle_max = 10.0
rates = [0.2]
"#;
        let cfg = parse_config(text).unwrap();
        let runs = cfg.scenarios().unwrap();
        assert_eq!(runs[1].name, "tiny");
        assert_eq!(runs[1].horizon, 50);
        let again = parse_config(&serialize_config(&cfg).unwrap()).unwrap();
        assert_eq!(again, cfg);
    }
}
