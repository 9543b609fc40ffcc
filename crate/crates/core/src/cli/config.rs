//! Run configuration: flags over config file over built-in defaults.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::agents::SamplingParams;
use crate::executors::ToolchainConfig;
use crate::orchestrator::Budgets;
use crate::rvv_front::FootprintMode;

pub const CONFIG_FILE: &str = "vecport.toml";
pub const DEFAULT_MODEL: &str = "gpt-4o";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LlmSource {
    Endpoint(String),
    Replay(PathBuf),
}

/// One source of settings. Every field is optional so layers can be stacked.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigLayer {
    pub corpus_dir: Option<PathBuf>,
    pub cases: Option<Vec<String>>,
    pub model: Option<String>,
    pub endpoint: Option<String>,
    pub replay: Option<PathBuf>,
    pub temperature: Option<f64>,
    pub max_tokens: Option<u32>,
    pub translate_max: Option<u32>,
    pub optimize_max: Option<u32>,
    pub mode: Option<FootprintMode>,
    pub parallelism: Option<usize>,
    pub out_dir: Option<PathBuf>,
    pub include_failed: Option<bool>,
    pub cc: Option<String>,
    pub flags: Option<String>,
    pub runner: Option<String>,
    pub compile_cmd_template: Option<String>,
    pub runner_cmd_template: Option<String>,
    pub vlens: Option<Vec<u32>>,
    pub compile_timeout_s: Option<u64>,
    pub run_timeout_s: Option<u64>,
    pub perf_runs: Option<u32>,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {message}")]
    Read { path: PathBuf, message: String },
    #[error("config file {path}: {message}")]
    Syntax { path: PathBuf, message: String },
    #[error("{0}")]
    Invalid(String),
}

impl ConfigLayer {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Read { path: path.to_path_buf(), message: e.to_string() })?;
        let mut layer: ConfigLayer = toml::from_str(&text)
            .map_err(|e| ConfigError::Syntax { path: path.to_path_buf(), message: e.to_string() })?;
        // paths in a config file are relative to the file
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut layer.corpus_dir, &mut layer.out_dir, &mut layer.replay].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(layer)
    }

    /// Fills every unset field of `self` from `lower`. The endpoint/replay
    /// pair moves as a unit so a flag can switch sources set by a file.
    pub fn over(self, lower: ConfigLayer) -> ConfigLayer {
        macro_rules! pick {
            ($e:ident, $r:ident; $($f:ident),*) => { ConfigLayer { $($f: self.$f.or(lower.$f),)* endpoint: $e, replay: $r } };
        }
        let (endpoint, replay) = if self.endpoint.is_some() || self.replay.is_some() {
            (self.endpoint.clone(), self.replay.clone())
        } else {
            (lower.endpoint.clone(), lower.replay.clone())
        };
        pick!(
            endpoint, replay;
            corpus_dir, cases, model, temperature, max_tokens, translate_max, optimize_max, mode, parallelism,
            out_dir, include_failed, cc, flags, runner, compile_cmd_template, runner_cmd_template, vlens,
            compile_timeout_s, run_timeout_s, perf_runs
        )
    }

    pub fn resolve(self) -> Result<RunConfig, ConfigError> {
        let llm = match (self.endpoint, self.replay) {
            (Some(_), Some(_)) => {
                return Err(ConfigError::Invalid("--endpoint and --replay are mutually exclusive".into()))
            }
            (Some(e), None) => Some(LlmSource::Endpoint(e)),
            (None, Some(r)) => Some(LlmSource::Replay(r)),
            (None, None) => None,
        };
        let t = ToolchainConfig::default();
        let s = SamplingParams::default();
        let b = Budgets::default();
        let cfg = RunConfig {
            corpus_dir: self.corpus_dir.unwrap_or_else(|| PathBuf::from("corpus")),
            cases: self.cases,
            model: self.model.unwrap_or_else(|| DEFAULT_MODEL.into()),
            llm,
            sampling: SamplingParams {
                temperature: self.temperature.unwrap_or(s.temperature),
                max_tokens: self.max_tokens.unwrap_or(s.max_tokens),
            },
            budgets: Budgets {
                translate_max: self.translate_max.unwrap_or(b.translate_max),
                optimize_max: self.optimize_max.unwrap_or(b.optimize_max),
            },
            toolchain: ToolchainConfig {
                compile_cmd_template: self.compile_cmd_template.unwrap_or(t.compile_cmd_template),
                cc: self.cc.unwrap_or(t.cc),
                flags: self.flags.unwrap_or(t.flags),
                runner_cmd_template: self.runner_cmd_template.unwrap_or(t.runner_cmd_template),
                runner: self.runner.unwrap_or(t.runner),
                vlens: self.vlens.unwrap_or(t.vlens),
                compile_timeout_s: self.compile_timeout_s.unwrap_or(t.compile_timeout_s),
                run_timeout_s: self.run_timeout_s.unwrap_or(t.run_timeout_s),
                perf_runs: self.perf_runs.unwrap_or(t.perf_runs),
            },
            mode: self.mode.unwrap_or_default(),
            parallelism: self.parallelism.unwrap_or(1),
            out_dir: self.out_dir.unwrap_or_else(|| PathBuf::from("out")),
            include_failed: self.include_failed.unwrap_or(false),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub corpus_dir: PathBuf,
    pub cases: Option<Vec<String>>,
    pub model: String,
    /// Required for `translate`; checked there.
    pub llm: Option<LlmSource>,
    pub sampling: SamplingParams,
    pub budgets: Budgets,
    pub toolchain: ToolchainConfig,
    pub mode: FootprintMode,
    pub parallelism: usize,
    pub out_dir: PathBuf,
    pub include_failed: bool,
}

impl RunConfig {
    fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: &str| Err(ConfigError::Invalid(m.to_string()));
        if self.budgets.translate_max == 0 || self.budgets.optimize_max == 0 {
            return bad("budgets must be at least 1");
        }
        if self.parallelism == 0 {
            return bad("parallelism must be at least 1");
        }
        if !(0.0..=2.0).contains(&self.sampling.temperature) {
            return bad("temperature must be within 0..=2");
        }
        self.toolchain.validate().map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    pub fn outcomes_dir(&self) -> PathBuf {
        self.out_dir.join("outcomes")
    }

    pub fn work_dir(&self) -> PathBuf {
        self.out_dir.join("work")
    }
}
