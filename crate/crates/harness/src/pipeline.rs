//! The pipeline stages. Each stage reads its inputs from and writes its
//! outputs to the paths in [`RunConfig`], so stages can run in separate
//! processes.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;

use gtr_core::gtr::GtrId;
use gtr_core::oracles::{extract_answer, judge};
use gtr_core::preference::{preference_report, rebuild_from_cache, GtrpBuild, PreferenceExample, ProbeRecord};
use gtr_core::reasoner::{
    reference_preferences, Calibration, MockPolicy, MockReasoner, Reasoner, ReasonerError, ReasonerRequest,
};
use gtr_core::rng::derive_seed;
use gtr_core::router::{route, train, RouterModel, TrainConfig, TrainingRecord};
use gtr_core::tasks::{generate_dataset, render_instruction, Question};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{EndpointKind, RunConfig};
use crate::error::HarnessError;
use crate::eval::{EvalReport, Outcomes, Routing};
use crate::http::{HttpReasoner, HttpSettings};
use crate::store::{read_json, read_jsonl, write_atomic, write_json, write_jsonl, ProbeStore};

/// Builds the reasoner selected by the configuration.
pub fn reasoner_from_config(cfg: &RunConfig) -> Result<Arc<dyn Reasoner>, HarnessError> {
    match cfg.endpoint.kind {
        EndpointKind::Http => Ok(Arc::new(HttpReasoner::new(HttpSettings::from_config(cfg)?)?)),
        EndpointKind::Mock => {
            let seed = derive_seed(cfg.seed, "mock");
            let policy = match (&cfg.endpoint.policy, cfg.endpoint.mock_calibration) {
                (Some(path), _) => {
                    let text = std::fs::read_to_string(path)
                        .map_err(|e| HarnessError::Config(format!("reading {}: {e}", path.display())))?;
                    MockPolicy::from_json(&text).map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?
                }
                (None, Some(table)) => MockPolicy::calibrated(seed, Calibration::new(reference_preferences(table))),
                (None, None) => MockPolicy::new(seed, Default::default()),
            };
            Ok(Arc::new(MockReasoner::new(policy)))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ProbeSummary {
    /// Triples already on disk when the run started.
    pub cached: usize,
    /// Triples requested in this run.
    pub attempted: usize,
    pub failed: usize,
    /// Triples still missing after this run.
    pub remaining: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainLog {
    pub examples: usize,
    pub schema_hash: String,
    /// How often each GTR appears in a label set.
    pub label_counts: BTreeMap<GtrId, usize>,
    pub training: Option<TrainingRecord>,
}

/// One (question, GTR) pair and the trials still to run for it.
struct Unit<'a> {
    question: &'a Question,
    gtr: GtrId,
    trials: Vec<usize>,
}

pub struct Pipeline {
    pub cfg: RunConfig,
    reasoner: Arc<dyn Reasoner>,
}

impl Pipeline {
    pub fn new(cfg: RunConfig, reasoner: Arc<dyn Reasoner>) -> Result<Self, HarnessError> {
        cfg.validate()?;
        Ok(Pipeline { cfg, reasoner })
    }

    pub fn from_config(cfg: RunConfig) -> Result<Self, HarnessError> {
        let reasoner = reasoner_from_config(&cfg)?;
        Pipeline::new(cfg, reasoner)
    }

    fn path(&self, p: &std::path::Path) -> PathBuf {
        self.cfg.path(p)
    }

    /// Writes the training and held-out question files.
    pub fn generate(&self) -> Result<(usize, usize), HarnessError> {
        let g = &self.cfg.generation;
        let make = |per_task, label: &str, prefix: &str| {
            generate_dataset(&g.tasks, per_task, &g.er, derive_seed(self.cfg.seed, label), prefix)
                .map_err(|e| HarnessError::Config(e.to_string()))
        };
        let train_qs = make(g.per_task, "questions/train", "train-")?;
        let eval_qs = make(g.eval_per_task, "questions/eval", "eval-")?;
        write_jsonl(&self.path(&self.cfg.paths.questions), &train_qs)?;
        write_jsonl(&self.path(&self.cfg.paths.eval_questions), &eval_qs)?;
        Ok((train_qs.len(), eval_qs.len()))
    }

    pub fn questions(&self) -> Result<Vec<Question>, HarnessError> {
        read_jsonl(&self.path(&self.cfg.paths.questions))
    }

    pub fn eval_questions(&self) -> Result<Vec<Question>, HarnessError> {
        read_jsonl(&self.path(&self.cfg.paths.eval_questions))
    }

    pub fn probe_store(&self) -> ProbeStore {
        ProbeStore::new(self.path(&self.cfg.paths.probes))
    }

    pub fn eval_store(&self) -> ProbeStore {
        ProbeStore::new(self.path(&self.cfg.paths.eval_probes))
    }

    /// Probes every (question, GTR, trial < k) triple missing from the
    /// store, at most `limit` of them.
    pub fn probe(&self, limit: Option<usize>) -> Result<ProbeSummary, HarnessError> {
        let questions = self.questions()?;
        self.run_store(&self.probe_store(), &questions, self.cfg.k, limit)
    }

    /// Fills `store` with `trials` responses per (question, GTR). Records
    /// are appended as batches finish; the store is rewritten in canonical
    /// order at the start and end of the run.
    fn run_store(
        &self,
        store: &ProbeStore,
        questions: &[Question],
        trials: usize,
        limit: Option<usize>,
    ) -> Result<ProbeSummary, HarnessError> {
        let order: Vec<String> = questions.iter().map(|q| q.id.clone()).collect();
        let done: std::collections::BTreeSet<_> =
            store.canonicalize(&order)?.into_iter().map(|r| (r.question_id, r.gtr, r.trial)).collect();
        let mut budget = limit.unwrap_or(usize::MAX);
        let mut units = Vec::new();
        let mut summary = ProbeSummary { cached: done.len(), ..Default::default() };
        for q in questions {
            for gtr in GtrId::POOL {
                let missing: Vec<usize> =
                    (0..trials).filter(|&t| !done.contains(&(q.id.clone(), gtr, t))).collect();
                let take = missing.len().min(budget);
                budget -= take;
                if take > 0 {
                    units.push(Unit { question: q, gtr, trials: missing[..take].to_vec() });
                }
            }
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.cfg.concurrency)
            .build()
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        let layout_root = derive_seed(self.cfg.seed, "layout");
        let mut first_error: Option<ReasonerError> = None;
        for batch in units.chunks(self.cfg.concurrency * 8) {
            let results: Vec<(Vec<ProbeRecord>, usize, Option<ReasonerError>)> =
                pool.install(|| batch.par_iter().map(|u| self.run_unit(u, layout_root)).collect());
            for (records, attempted, error) in results {
                store.append(&records)?;
                summary.attempted += attempted;
                if let Some(e) = error {
                    summary.failed += 1;
                    first_error.get_or_insert(e);
                }
            }
            // Retries are already exhausted inside the reasoner; further
            // batches would most likely fail the same way.
            if first_error.is_some() {
                break;
            }
        }
        let ids: std::collections::HashSet<&str> = order.iter().map(String::as_str).collect();
        let present =
            store.canonicalize(&order)?.iter().filter(|r| r.trial < trials && ids.contains(r.question_id.as_str())).count();
        summary.remaining = questions.len() * GtrId::POOL.len() * trials - present;
        if let Some(e) = first_error {
            let msg = format!("{} of {} requests failed (first: {e})", summary.failed, summary.attempted);
            return Err(match e {
                ReasonerError::Config(_) => HarnessError::Config(msg),
                _ => HarnessError::Endpoint(msg),
            });
        }
        Ok(summary)
    }

    fn run_unit(&self, u: &Unit<'_>, layout_root: u64) -> (Vec<ProbeRecord>, usize, Option<ReasonerError>) {
        let q = u.question;
        let seed = derive_seed(layout_root, &format!("layout/{}", q.id));
        let mut req = ReasonerRequest::new(q, u.gtr, self.reasoner.wants_payload(), seed);
        req.temperature = self.cfg.temperature;
        req.max_output_tokens = self.cfg.max_output_tokens;
        let mut records = Vec::with_capacity(u.trials.len());
        for &trial in &u.trials {
            match self.reasoner.ask(&req, trial) {
                Ok(resp) => {
                    let correct = judge(q, &extract_answer(&resp.raw_text, q.task));
                    records.push(ProbeRecord::new(&q.id, u.gtr, trial, correct, resp.completion_tokens.max(1)));
                }
                Err(e) => {
                    log::warn!("{}/{}/{trial}: {e}", q.id, u.gtr);
                    let attempted = records.len() + 1;
                    return (records, attempted, Some(e));
                }
            }
        }
        let attempted = records.len();
        (records, attempted, None)
    }

    /// Scores the cached probes under the configured GRE parameters and
    /// writes the dataset and the preference report. Makes no reasoner
    /// calls; questions with missing probes are excluded.
    pub fn build_gtrp(&self) -> Result<GtrpBuild, HarnessError> {
        let store = self.probe_store();
        if !store.path().exists() {
            return Err(HarnessError::Data(format!("{} not found; run probe first", store.path().display())));
        }
        let questions = self.questions()?;
        let build = rebuild_from_cache(&questions, &store.load()?, self.cfg.k, &self.cfg.gre_params());
        if !build.excluded.is_empty() {
            log::warn!("{} questions excluded for missing probes", build.excluded.len());
        }
        write_jsonl(&self.path(&self.cfg.paths.dataset), &build.examples)?;
        let report = preference_report(&build.examples);
        let base = self.path(&self.cfg.paths.preference_report);
        write_atomic(&base.with_extension("tsv"), &report.to_tsv())?;
        write_atomic(&base.with_extension("md"), &report.to_markdown())?;
        Ok(build)
    }

    pub fn train_router(&self) -> Result<RouterModel, HarnessError> {
        let dataset: Vec<PreferenceExample> = read_jsonl(&self.path(&self.cfg.paths.dataset))?;
        let config = TrainConfig { seed: derive_seed(self.cfg.seed, "router"), ..self.cfg.train.clone() };
        let model = train(&dataset, &config).map_err(|e| HarnessError::Data(e.to_string()))?;
        let mut label_counts: BTreeMap<GtrId, usize> = GtrId::POOL.iter().map(|&g| (g, 0)).collect();
        for ex in &dataset {
            for g in &ex.labels {
                *label_counts.entry(*g).or_default() += 1;
            }
        }
        let log = TrainLog {
            examples: dataset.len(),
            schema_hash: model.schema_hash.clone(),
            label_counts,
            training: model.config.clone(),
        };
        write_atomic(&self.path(&self.cfg.paths.model), &(model.to_json() + "\n"))?;
        write_json(&self.path(&self.cfg.paths.train_log), &log)?;
        Ok(model)
    }

    pub fn load_model(&self) -> Result<RouterModel, HarnessError> {
        let path = self.path(&self.cfg.paths.model);
        let text = std::fs::read_to_string(&path).map_err(|e| HarnessError::io(&path, e))?;
        RouterModel::from_json(&text).map_err(|e| HarnessError::Data(format!("{}: {e}", path.display())))
    }

    /// Runs every GTR `trials` times on the held-out questions, routes each
    /// question and writes the report. Responses are cached, so evaluating
    /// another router on the same questions makes no new calls.
    pub fn evaluate(&self) -> Result<EvalReport, HarnessError> {
        let model = self.load_model()?;
        let questions = self.eval_questions()?;
        let store = self.eval_store();
        self.run_store(&store, &questions, self.cfg.trials, None)?;
        let mut outcomes = Outcomes::new();
        for r in store.load()? {
            outcomes.insert((r.question_id, r.gtr, r.trial), (r.correctness, r.tokens));
        }
        let routing = questions
            .iter()
            .map(|q| {
                let gtr = route(&model, q, &render_instruction(q)).map_err(|e| HarnessError::Data(e.to_string()))?;
                Ok(Routing { question_id: q.id.clone(), task: q.task, gtr })
            })
            .collect::<Result<Vec<_>, HarnessError>>()?;
        let report = EvalReport::build(&questions, routing, &outcomes, self.cfg.trials, &self.cfg.gre_params())?;
        write_json(&self.path(&self.cfg.paths.eval_report), &report)?;
        Ok(report)
    }

    /// Renders evaluation reports (the configured one when `files` is
    /// empty) as Markdown and TSV, writes both and returns the Markdown.
    pub fn report(&self, files: &[PathBuf]) -> Result<String, HarnessError> {
        let files = if files.is_empty() { vec![self.path(&self.cfg.paths.eval_report)] } else { files.to_vec() };
        let (mut md, mut tsv) = (String::new(), String::new());
        for f in &files {
            let report: EvalReport = read_json(f)?;
            if files.len() > 1 {
                md.push_str(&format!("## {}\n\n", f.display()));
            }
            md.push_str(&report.to_markdown());
            md.push('\n');
            let body = report.to_tsv();
            if tsv.is_empty() {
                tsv.push_str("source\t");
                tsv.push_str(body.lines().next().unwrap_or_default());
                tsv.push('\n');
            }
            for line in body.lines().skip(1) {
                tsv.push_str(&format!("{}\t{line}\n", f.display()));
            }
        }
        let base = self.path(&self.cfg.paths.report);
        write_atomic(&base.with_extension("md"), &md)?;
        write_atomic(&base.with_extension("tsv"), &tsv)?;
        Ok(md)
    }
}
