//! Run configuration: a TOML document with `model`, `experiment` and
//! `optimizer` sections plus top-level `mode`, `output` and `seed`.
//!
//! ```toml
//! mode = "balanced"
//! output = "runs/balanced"
//! seed = 3
//!
//! [model]
//! g_hz = 217.4
//!
//! [experiment]
//! true_g_hz = 219.574
//! amplitude_scale = [0.98, 0.98, 1.0, 1.0]
//! distortion_tau_s = 5e-5
//! t1_s = [0.730, 0.096]
//! t2_s = [0.0965, 0.0425]
//! noise_sigma = 1e-3
//!
//! [optimizer]
//! max_iterations = 2000
//! ```

use std::path::PathBuf;

use bellopt::experiment::ExperimentConfig;
use bellopt::optimizer::{OptimizerConfig, RunMode};
use bellopt::{Error, SystemModel, NOMINAL_COUPLING_HZ};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub g_hz: f64,
}

impl Default for ModelSection {
    fn default() -> Self {
        Self { g_hz: NOMINAL_COUPLING_HZ }
    }
}

/// Experiment keys as written in files. Missing keys mean "no imperfection":
/// true coupling equal to the model's, unit scales, no distortion, no
/// relaxation (`inf`), no noise.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSection {
    pub true_g_hz: Option<f64>,
    pub amplitude_scale: Option<[f64; 4]>,
    pub distortion_tau_s: Option<f64>,
    pub t1_s: Option<[f64; 2]>,
    pub t2_s: Option<[f64; 2]>,
    pub noise_sigma: Option<f64>,
    pub seconds_per_measurement: Option<f64>,
    pub seed: Option<u64>,
}

impl ExperimentSection {
    /// The reference mismatch scenario, expressed as a section.
    pub fn reference_mismatch(g_hz: f64) -> Self {
        let r = ExperimentConfig::reference_mismatch(g_hz, 0);
        Self {
            true_g_hz: Some(r.true_g),
            amplitude_scale: Some(r.amplitude_scale),
            distortion_tau_s: Some(r.distortion_tau),
            t1_s: Some(r.t1),
            t2_s: Some(r.t2),
            noise_sigma: Some(r.noise_sigma),
            seconds_per_measurement: Some(r.seconds_per_measurement),
            seed: None,
        }
    }

    pub fn resolve(&self, g_hz: f64, run_seed: u64) -> ExperimentConfig {
        let base = ExperimentConfig::ideal(g_hz);
        ExperimentConfig {
            true_g: self.true_g_hz.unwrap_or(base.true_g),
            amplitude_scale: self.amplitude_scale.unwrap_or(base.amplitude_scale),
            distortion_tau: self.distortion_tau_s.unwrap_or(base.distortion_tau),
            t1: self.t1_s.unwrap_or(base.t1),
            t2: self.t2_s.unwrap_or(base.t2),
            noise_sigma: self.noise_sigma.unwrap_or(base.noise_sigma),
            seconds_per_measurement: self.seconds_per_measurement.unwrap_or(base.seconds_per_measurement),
            seed: self.seed.unwrap_or(run_seed),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    mode: Option<String>,
    #[serde(default)]
    output: Option<PathBuf>,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    model: ModelSection,
    #[serde(default)]
    experiment: Option<ExperimentSection>,
    #[serde(default)]
    optimizer: OptimizerConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub mode: RunMode,
    pub output: PathBuf,
    pub seed: u64,
    pub model: ModelSection,
    pub experiment: Option<ExperimentSection>,
    pub optimizer: OptimizerConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            mode: RunMode::ModelOnly,
            output: PathBuf::from("bellopt-out"),
            seed: 0,
            model: ModelSection::default(),
            experiment: None,
            optimizer: OptimizerConfig::default(),
        }
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Parse and fully validate a run configuration.
pub fn parse_config(text: &str) -> Result<RunConfig, Error> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Parse {
        line: e.span().map_or(0, |s| line_of(text, s.start)),
        message: e.message().to_string(),
    })?;
    let defaults = RunConfig::default();
    let mode = match raw.mode {
        Some(m) => m.parse().map_err(|_| {
            Error::config("mode", format!("must be model-only, experiment-only or balanced, got `{m}`"))
        })?,
        None => defaults.mode,
    };
    let cfg = RunConfig {
        mode,
        output: raw.output.unwrap_or(defaults.output),
        seed: raw.seed.unwrap_or(defaults.seed),
        model: raw.model,
        experiment: raw.experiment,
        optimizer: raw.optimizer,
    };
    cfg.validate()?;
    Ok(cfg)
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), Error> {
        SystemModel::new(self.model.g_hz).map_err(|_| {
            Error::config("model.g_hz", format!("must be > 0, got {}", self.model.g_hz))
        })?;
        self.optimizer.validate()?;
        if let Some(e) = &self.experiment_config() {
            e.validate()?;
        }
        if self.mode.needs_experiment() && self.experiment.is_none() {
            return Err(Error::config("experiment", format!("section required for mode {}", self.mode)));
        }
        Ok(())
    }

    pub fn system_model(&self) -> SystemModel {
        SystemModel::new(self.model.g_hz).expect("validated")
    }

    pub fn experiment_config(&self) -> Option<ExperimentConfig> {
        self.experiment.as_ref().map(|e| e.resolve(self.model.g_hz, self.seed))
    }
}
