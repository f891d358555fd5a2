use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use gtr_core::gtr::GtrId;
use gtr_core::preference::{gre, GreParams};
use gtr_core::reasoner::{
    ArmPolicy, MockPolicy, MockReasoner, Reasoner, ReasonerError, ReasonerRequest, ReasonerResponse,
};
use gtr_core::tasks::TaskKind;
use gtrbench::config::EndpointKind;
use gtrbench::{HarnessError, Method, Pipeline, RunConfig};

fn config(dir: &Path, tasks: &[TaskKind], per_task: usize, eval_per_task: usize) -> RunConfig {
    let mut cfg = RunConfig::default();
    cfg.paths.out_dir = dir.to_path_buf();
    cfg.endpoint.kind = EndpointKind::Mock;
    cfg.generation.tasks = tasks.to_vec();
    cfg.generation.per_task = per_task;
    cfg.generation.eval_per_task = eval_per_task;
    cfg.seed = 17;
    cfg
}

fn pipeline(cfg: RunConfig, policy: MockPolicy) -> Pipeline {
    Pipeline::new(cfg, Arc::new(MockReasoner::new(policy))).unwrap()
}

fn noisy() -> MockPolicy {
    MockPolicy::new(5, ArmPolicy::new(0.5, 200.0, 0.6))
}

#[test]
fn interrupted_probing_resumes_to_the_same_store() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let tasks = [TaskKind::Conn, TaskKind::MF];
    let whole = pipeline(config(a.path(), &tasks, 4, 1), noisy());
    whole.generate().unwrap();
    let s = whole.probe(None).unwrap();
    assert_eq!((s.attempted, s.remaining), (8 * 8 * 3, 0));

    let parts = pipeline(config(b.path(), &tasks, 4, 1), noisy());
    parts.generate().unwrap();
    assert_eq!(parts.probe(Some(7)).unwrap().remaining, 8 * 8 * 3 - 7);
    // A run killed mid-write leaves a partial last line.
    let store = parts.probe_store();
    let mut text = fs::read_to_string(store.path()).unwrap();
    text.push_str("{\"question_id\":\"train-Co");
    fs::write(store.path(), text).unwrap();
    parts.probe(Some(50)).unwrap();
    let last = parts.probe(None).unwrap();
    assert_eq!((last.cached, last.remaining), (57, 0));

    assert_eq!(fs::read(whole.probe_store().path()).unwrap(), fs::read(store.path()).unwrap());
    assert_eq!(parts.probe(None).unwrap().attempted, 0);
}

/// Share of questions whose label set contains the GTR with the highest
/// expected GRE.
fn agreement_with_truth(k: usize) -> f64 {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(dir.path(), &[TaskKind::Cyc], 150, 1);
    cfg.k = k;
    // Vneato has a higher mean GRE than any other GTR, but single trials
    // are noisy enough to hide it.
    let policy = MockPolicy::new(9, ArmPolicy::new(0.5, 200.0, 0.8)).with_arm(
        TaskKind::Cyc,
        GtrId::Vneato,
        ArmPolicy::new(0.75, 200.0, 0.8),
    );
    let p = pipeline(cfg, policy);
    p.generate().unwrap();
    p.probe(None).unwrap();
    let build = p.build_gtrp().unwrap();
    let hits = build.examples.iter().filter(|e| e.labels.contains(&GtrId::Vneato)).count();
    hits as f64 / build.examples.len() as f64
}

#[test]
fn more_trials_recover_the_true_optimum_more_often() {
    let (one, ten) = (agreement_with_truth(1), agreement_with_truth(10));
    assert!(ten > one, "k=1: {one:.3}, k=10: {ten:.3}");
}

#[test]
fn every_cell_aggregates_trials_times_questions() {
    let dir = tempfile::tempdir().unwrap();
    let tasks = [TaskKind::Conn, TaskKind::TS, TaskKind::BGM];
    let mut cfg = config(dir.path(), &tasks, 6, 5);
    cfg.trials = 3;
    let mock = Arc::new(MockReasoner::new(noisy()));
    let p = Pipeline::new(cfg, mock.clone()).unwrap();
    p.generate().unwrap();
    p.probe(None).unwrap();
    p.build_gtrp().unwrap();
    p.train_router().unwrap();
    let before = mock.calls();
    let report = p.evaluate().unwrap();
    assert_eq!(mock.calls() - before, 3 * 5 * 8 * 3);
    assert_eq!(report.cells.len(), 9 * 3);
    for c in &report.cells {
        assert_eq!(c.responses, 3 * 5, "{} {}", c.method, c.task);
        assert!((0.0..=100.0).contains(&c.accuracy));
        assert!(c.mean_tokens >= 1.0);
    }
    // A second evaluation reuses the cached responses.
    p.evaluate().unwrap();
    assert_eq!(mock.calls() - before, 3 * 5 * 8 * 3);
}

#[test]
fn router_beats_text_baselines_when_vneato_is_best_for_cycles() {
    let dir = tempfile::tempdir().unwrap();
    let mut policy = MockPolicy::new(3, ArmPolicy::new(0.5, 300.0, 0.2))
        .with_arm(TaskKind::Cyc, GtrId::Vneato, ArmPolicy::new(0.9, 8.0, 0.0));
    for g in [GtrId::Tset, GtrId::Tlist, GtrId::Tmat] {
        policy = policy.with_arm(TaskKind::Cyc, g, ArmPolicy::new(0.4, 400.0, 0.2));
    }
    let p = pipeline(config(dir.path(), &[TaskKind::Cyc], 100, 40), policy);
    p.generate().unwrap();
    p.probe(None).unwrap();
    p.build_gtrp().unwrap();
    p.train_router().unwrap();
    let report = p.evaluate().unwrap();
    let routed = report.cell(Method::Routed, TaskKind::Cyc).unwrap();
    for g in [GtrId::Tset, GtrId::Tlist, GtrId::Tmat] {
        let fixed = report.cell(Method::Fixed(g), TaskKind::Cyc).unwrap();
        assert!(routed.accuracy > fixed.accuracy, "routed {} vs {g} {}", routed.accuracy, fixed.accuracy);
    }
    let best = GtrId::POOL
        .iter()
        .map(|&g| report.cell(Method::Fixed(g), TaskKind::Cyc).unwrap().mean_gre)
        .fold(f64::NEG_INFINITY, f64::max);
    assert!(routed.mean_gre >= best - 0.01, "routed {} vs best {best}", routed.mean_gre);
}

#[test]
fn alpha_rebuild_reads_only_the_cache() {
    let dir = tempfile::tempdir().unwrap();
    let mock = Arc::new(MockReasoner::new(noisy()));
    let p = Pipeline::new(config(dir.path(), &[TaskKind::SP], 10, 1), mock.clone()).unwrap();
    p.generate().unwrap();
    p.probe(None).unwrap();
    let calls = mock.calls();
    let mut cfg = p.cfg.clone();
    cfg.alpha = 0.0;
    let rebuilt = Pipeline::new(cfg, mock.clone()).unwrap().build_gtrp().unwrap();
    assert_eq!(mock.calls(), calls);
    // Every label set is the argmax of mean correctness at alpha 0.
    let records = p.probe_store().load().unwrap();
    for ex in &rebuilt.examples {
        let mut hits: BTreeMap<GtrId, u32> = BTreeMap::new();
        for r in records.iter().filter(|r| r.question_id == ex.id) {
            *hits.entry(r.gtr).or_default() += r.correctness as u32;
        }
        let best = *hits.values().max().unwrap();
        let expected: Vec<GtrId> = hits.iter().filter(|(_, &h)| h == best).map(|(&g, _)| g).collect();
        assert_eq!(ex.labels, expected);
        let zero = GreParams::with_alpha(0.0);
        let gre_best = ex.gre.values().copied().fold(f64::NEG_INFINITY, f64::max);
        assert!((gre_best - best as f64 * gre(1, 1, &zero).unwrap() / 3.0).abs() < 1e-9);
    }
}

#[test]
fn building_without_probes_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = pipeline(config(dir.path(), &[TaskKind::Conn], 2, 1), noisy());
    p.generate().unwrap();
    assert!(matches!(p.build_gtrp(), Err(HarnessError::Data(_))));
}

#[test]
fn report_renders_saved_evaluations() {
    let dir = tempfile::tempdir().unwrap();
    let p = pipeline(config(dir.path(), &[TaskKind::HP], 8, 4), noisy());
    p.generate().unwrap();
    p.probe(None).unwrap();
    p.build_gtrp().unwrap();
    p.train_router().unwrap();
    p.evaluate().unwrap();
    let md = p.report(&[]).unwrap();
    assert!(md.contains("| routed |"));
    assert!(md.contains("HP Acc"));
    let tsv = fs::read_to_string(dir.path().join("report.tsv")).unwrap();
    assert_eq!(tsv.lines().count(), 1 + 9 * 2);
    assert!(dir.path().join("preferences.md").exists());
    assert!(dir.path().join("train_log.json").exists());
}

/// Fails every request after the first `ok` ones.
struct Flaky {
    ok: usize,
    calls: AtomicUsize,
    inner: MockReasoner,
}

impl Reasoner for Flaky {
    fn ask(&self, req: &ReasonerRequest, trial: usize) -> Result<ReasonerResponse, ReasonerError> {
        if self.calls.fetch_add(1, Ordering::SeqCst) < self.ok {
            self.inner.ask(req, trial)
        } else {
            Err(ReasonerError::Transport("connection reset".into()))
        }
    }

    fn wants_payload(&self) -> bool {
        false
    }
}

#[test]
fn endpoint_failure_stops_after_the_current_batch() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(dir.path(), &[TaskKind::Conn], 20, 1);
    cfg.concurrency = 1;
    let flaky = Arc::new(Flaky { ok: 10, calls: AtomicUsize::new(0), inner: MockReasoner::new(noisy()) });
    let p = Pipeline::new(cfg, flaky.clone()).unwrap();
    p.generate().unwrap();
    assert!(matches!(p.probe(None), Err(HarnessError::Endpoint(_))));
    // One batch is 8 units of 3 trials; a unit gives up at its first error.
    assert!(flaky.calls.load(Ordering::SeqCst) <= 8 * 3);
    assert_eq!(p.probe_store().load().unwrap().len(), 10);

    let resumed = pipeline(p.cfg.clone(), noisy());
    let s = resumed.probe(None).unwrap();
    assert_eq!((s.cached, s.attempted, s.remaining), (10, 20 * 8 * 3 - 10, 0));
}
