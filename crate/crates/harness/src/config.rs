//! Run configuration. Loaded from JSON, then overridden from the command line.

use std::path::{Path, PathBuf};

use gtr_core::graph::ErConfig;
use gtr_core::preference::{Aggregation, GreParams, LogBase, DEFAULT_ALPHA};
use gtr_core::reasoner::{ReferenceTable, DEFAULT_MAX_OUTPUT_TOKENS, DEFAULT_TEMPERATURE};
use gtr_core::router::TrainConfig;
use gtr_core::tasks::TaskKind;
use serde::{Deserialize, Serialize};

use crate::error::HarnessError;

/// Output files, relative to `out_dir` unless absolute.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    pub out_dir: PathBuf,
    pub questions: PathBuf,
    pub eval_questions: PathBuf,
    pub probes: PathBuf,
    /// Responses gathered during evaluation.
    pub eval_probes: PathBuf,
    pub dataset: PathBuf,
    pub preference_report: PathBuf,
    pub model: PathBuf,
    pub train_log: PathBuf,
    pub eval_report: PathBuf,
    pub report: PathBuf,
}

impl Default for Paths {
    fn default() -> Self {
        Paths {
            out_dir: PathBuf::from("run"),
            questions: "questions.jsonl".into(),
            eval_questions: "eval_questions.jsonl".into(),
            probes: "probes.jsonl".into(),
            eval_probes: "eval_probes.jsonl".into(),
            dataset: "gtrp.jsonl".into(),
            preference_report: "preferences".into(),
            model: "router.json".into(),
            train_log: "train_log.json".into(),
            eval_report: "eval_report.json".into(),
            report: "report".into(),
        }
    }
}

impl Paths {
    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.out_dir.join(p)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum EndpointKind {
    Mock,
    Http,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EndpointConfig {
    pub kind: EndpointKind,
    /// Mock policy JSON file. Without one the mock uses `mock_calibration`
    /// or, failing that, a uniform default policy.
    pub policy: Option<PathBuf>,
    pub mock_calibration: Option<ReferenceTable>,
    /// Model name sent to the HTTP endpoint.
    pub model: String,
    /// Overrides `GTR_API_BASE`.
    pub base_url: Option<String>,
    pub max_retries: u32,
    pub initial_backoff_ms: u64,
    pub timeout_secs: u64,
    /// Token-bucket refill rate. Zero or less disables rate limiting.
    pub requests_per_second: f64,
    /// Longest side of images sent for visual GTRs.
    pub raster_px: u32,
}

impl Default for EndpointConfig {
    fn default() -> Self {
        EndpointConfig {
            kind: EndpointKind::Mock,
            policy: None,
            mock_calibration: None,
            model: "gpt-4o".into(),
            base_url: None,
            max_retries: 5,
            initial_backoff_ms: 500,
            timeout_secs: 120,
            requests_per_second: 5.0,
            raster_px: gtr_core::gtr::raster::DEFAULT_RASTER_PX,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenerationConfig {
    pub tasks: Vec<TaskKind>,
    pub per_task: usize,
    pub eval_per_task: usize,
    pub er: ErConfig,
}

impl Default for GenerationConfig {
    fn default() -> Self {
        GenerationConfig { tasks: TaskKind::ALGORITHMIC.to_vec(), per_task: 1000, eval_per_task: 100, er: ErConfig::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub paths: Paths,
    pub endpoint: EndpointConfig,
    pub generation: GenerationConfig,
    pub alpha: f64,
    pub log_base: LogBase,
    pub aggregation: Aggregation,
    /// Probe trials per (question, GTR) when building preferences.
    pub k: usize,
    /// Trials per (question, method) during evaluation.
    pub trials: usize,
    pub temperature: f64,
    pub max_output_tokens: u32,
    /// In-flight request limit during probing and evaluation.
    pub concurrency: usize,
    /// Root seed. Every stage derives its own seed from it by label.
    pub seed: u64,
    /// Grid for router training. Its `seed` is replaced by one derived
    /// from the root seed.
    pub train: TrainConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            paths: Paths::default(),
            endpoint: EndpointConfig::default(),
            generation: GenerationConfig::default(),
            alpha: DEFAULT_ALPHA,
            log_base: LogBase::Natural,
            aggregation: Aggregation::MeanOfScores,
            k: 3,
            trials: 3,
            temperature: DEFAULT_TEMPERATURE,
            max_output_tokens: DEFAULT_MAX_OUTPUT_TOKENS,
            concurrency: 4,
            seed: 0,
            train: TrainConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("reading {}: {e}", path.display())))?;
        let cfg: RunConfig =
            serde_json::from_str(&text).map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let fail = |msg: String| Err(HarnessError::Config(msg));
        if self.k == 0 {
            return fail("k must be at least 1".into());
        }
        if self.trials == 0 {
            return fail("trials must be at least 1".into());
        }
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return fail(format!("alpha must be a nonnegative number, got {}", self.alpha));
        }
        if !(self.temperature.is_finite() && self.temperature >= 0.0) {
            return fail(format!("temperature must be nonnegative, got {}", self.temperature));
        }
        if self.concurrency == 0 {
            return fail("concurrency must be at least 1".into());
        }
        if self.max_output_tokens == 0 {
            return fail("max_output_tokens must be at least 1".into());
        }
        let g = &self.generation;
        if g.tasks.is_empty() || g.per_task == 0 || g.eval_per_task == 0 {
            return fail("generation needs at least one task and one question per task".into());
        }
        if let Some(t) = g.tasks.iter().find(|t| !TaskKind::ALGORITHMIC.contains(t)) {
            return fail(format!("{t} questions come from ingested graphs and cannot be generated"));
        }
        if self.train.grid().is_empty() {
            return fail("the training grid is empty".into());
        }
        if self.endpoint.raster_px < 16 {
            return fail("raster_px must be at least 16".into());
        }
        Ok(())
    }

    pub fn gre_params(&self) -> GreParams {
        GreParams { alpha: self.alpha, log_base: self.log_base, aggregation: self.aggregation }
    }

    pub fn path(&self, p: &Path) -> PathBuf {
        self.paths.resolve(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let cfg = RunConfig::default();
        cfg.validate().unwrap();
        assert_eq!((cfg.k, cfg.trials, cfg.temperature, cfg.concurrency), (3, 3, 0.7, 4));
    }

    #[test]
    fn partial_json_fills_defaults() {
        let cfg: RunConfig = serde_json::from_str(r#"{"k": 5, "endpoint": {"kind": "http"}}"#).unwrap();
        assert_eq!(cfg.k, 5);
        assert_eq!(cfg.endpoint.kind, EndpointKind::Http);
        assert_eq!(cfg.trials, 3);
    }

    #[test]
    fn rejects_bad_values() {
        for patch in [
            RunConfig { k: 0, ..Default::default() },
            RunConfig { alpha: -1.0, ..Default::default() },
            RunConfig { concurrency: 0, ..Default::default() },
        ] {
            assert!(matches!(patch.validate(), Err(HarnessError::Config(_))));
        }
        assert!(serde_json::from_str::<RunConfig>(r#"{"kk": 1}"#).is_err());
    }

    #[test]
    fn relative_paths_live_under_out_dir() {
        let p = Paths { out_dir: "/tmp/x".into(), ..Default::default() };
        assert_eq!(p.resolve(Path::new("a.json")), PathBuf::from("/tmp/x/a.json"));
        assert_eq!(p.resolve(Path::new("/abs.json")), PathBuf::from("/abs.json"));
    }
}
