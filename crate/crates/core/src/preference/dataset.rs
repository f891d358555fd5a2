use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{mean_gre_per_gtr, preferred_set, GreParams, DEFAULT_TIE_EPSILON};
use crate::gtr::GtrId;
use crate::oracles::{extract_answer, judge};
use crate::reasoner::{Reasoner, ReasonerError, ReasonerRequest};
use crate::rng::derive_seed;
use crate::router::featurize;
use crate::tasks::{render_instruction, Question, TaskKind};

/// Outcome of one reasoner call for a (question, GTR, trial) triple.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeRecord {
    pub question_id: String,
    pub gtr: GtrId,
    pub trial: usize,
    pub correctness: u8,
    pub tokens: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raw_text: Option<String>,
}

impl ProbeRecord {
    pub fn new(question_id: &str, gtr: GtrId, trial: usize, correctness: u8, tokens: u32) -> Self {
        ProbeRecord { question_id: question_id.to_string(), gtr, trial, correctness, tokens, raw_text: None }
    }
}

/// One row of the preference dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreferenceExample {
    pub id: String,
    pub task: TaskKind,
    pub features: Vec<f64>,
    /// The argmax set of `gre`, in pool order.
    pub labels: Vec<GtrId>,
    pub gre: BTreeMap<GtrId, f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct GtrpBuild {
    pub examples: Vec<PreferenceExample>,
    /// Ids of questions left out because some record was missing.
    pub excluded: Vec<String>,
}

/// Probes every GTR `k` times for `q`. Failed calls are returned alongside
/// the records that succeeded.
pub fn probe_question(
    reasoner: &dyn Reasoner,
    q: &Question,
    k: usize,
    layout_seed: u64,
    keep_raw: bool,
) -> (Vec<ProbeRecord>, Vec<(GtrId, usize, ReasonerError)>) {
    let mut records = Vec::with_capacity(8 * k);
    let mut failures = Vec::new();
    for gtr in GtrId::POOL {
        let seed = derive_seed(layout_seed, &format!("layout/{}", q.id));
        let req = ReasonerRequest::new(q, gtr, reasoner.wants_payload(), seed);
        for trial in 0..k {
            match reasoner.ask(&req, trial) {
                Ok(resp) => {
                    let answer = extract_answer(&resp.raw_text, q.task);
                    let mut record =
                        ProbeRecord::new(&q.id, gtr, trial, judge(q, &answer), resp.completion_tokens.max(1));
                    if keep_raw {
                        record.raw_text = Some(resp.raw_text);
                    }
                    records.push(record);
                }
                Err(e) => failures.push((gtr, trial, e)),
            }
        }
    }
    (records, failures)
}

/// Scores cached probe records. Questions keep their input order; any
/// question lacking a record is excluded and logged.
pub fn rebuild_from_cache(questions: &[Question], records: &[ProbeRecord], k: usize, params: &GreParams) -> GtrpBuild {
    let mut by_question: BTreeMap<&str, Vec<ProbeRecord>> = BTreeMap::new();
    for r in records {
        by_question.entry(r.question_id.as_str()).or_default().push(r.clone());
    }
    let mut build = GtrpBuild::default();
    for q in questions {
        let rs = by_question.get(q.id.as_str()).map(Vec::as_slice).unwrap_or(&[]);
        let table = match mean_gre_per_gtr(rs, k, params) {
            Ok(table) => table,
            Err(e) => {
                log::warn!("excluding {}: {e}", q.id);
                build.excluded.push(q.id.clone());
                continue;
            }
        };
        build.examples.push(PreferenceExample {
            id: q.id.clone(),
            task: q.task,
            features: featurize(q, &render_instruction(q)),
            labels: preferred_set(&table, DEFAULT_TIE_EPSILON).into_iter().collect(),
            gre: table,
        });
    }
    build
}

/// Probes all questions and builds the dataset. Returns the raw records so
/// that the dataset can be rebuilt later under other parameters.
pub fn build_gtrp(
    questions: &[Question],
    reasoner: &dyn Reasoner,
    k: usize,
    params: &GreParams,
    layout_seed: u64,
) -> (GtrpBuild, Vec<ProbeRecord>) {
    let mut records = Vec::new();
    for q in questions {
        let (rs, failures) = probe_question(reasoner, q, k, layout_seed, false);
        for (gtr, trial, e) in failures {
            log::warn!("probe {}/{gtr}/{trial} failed: {e}", q.id);
        }
        records.extend(rs);
    }
    (rebuild_from_cache(questions, &records, k, params), records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::ErConfig;
    use crate::reasoner::{ArmPolicy, MockPolicy, MockReasoner, ReasonerResponse};
    use crate::tasks::generate_dataset;

    fn questions() -> Vec<Question> {
        generate_dataset(&[TaskKind::Cyc, TaskKind::SP], 5, &ErConfig::default(), 9, "t-").unwrap()
    }

    #[test]
    fn mock_optimum_is_recovered() {
        let policy = MockPolicy::new(1, ArmPolicy::new(0.2, 500.0, 0.1))
            .with_arm(TaskKind::Cyc, GtrId::Vneato, ArmPolicy::new(1.0, 20.0, 0.0))
            .with_arm(TaskKind::SP, GtrId::Tlist, ArmPolicy::new(1.0, 20.0, 0.0));
        let mock = MockReasoner::new(policy);
        let qs = questions();
        let (build, records) = build_gtrp(&qs, &mock, 3, &GreParams::default(), 0);
        assert_eq!(records.len(), qs.len() * 8 * 3);
        assert_eq!(mock.calls(), records.len() as u64);
        for ex in &build.examples {
            let want = if ex.task == TaskKind::Cyc { GtrId::Vneato } else { GtrId::Tlist };
            assert_eq!(ex.labels, vec![want]);
        }
        assert_eq!(rebuild_from_cache(&qs, &records, 3, &GreParams::default()), build);
    }

    struct Flaky;

    impl Reasoner for Flaky {
        fn ask(&self, req: &ReasonerRequest, trial: usize) -> Result<ReasonerResponse, ReasonerError> {
            if req.question.id.ends_with("00001") && req.gtr == GtrId::Tmat && trial == 1 {
                return Err(ReasonerError::Transport("reset".into()));
            }
            Ok(ReasonerResponse { raw_text: "<answer>No</answer>".into(), completion_tokens: 0, latency_ms: 1 })
        }

        fn wants_payload(&self) -> bool {
            false
        }
    }

    #[test]
    fn failed_probes_exclude_the_question() {
        let qs = questions();
        let (build, records) = build_gtrp(&qs, &Flaky, 2, &GreParams::default(), 0);
        assert_eq!(build.excluded.len(), 2);
        assert_eq!(build.examples.len(), qs.len() - 2);
        assert!(records.iter().all(|r| r.tokens == 1));
    }

    #[test]
    fn example_json_shape() {
        let ex = PreferenceExample {
            id: "a".into(),
            task: TaskKind::Conn,
            features: vec![1.0],
            labels: vec![GtrId::Vfdp],
            gre: BTreeMap::from([(GtrId::Vfdp, 1.5)]),
        };
        assert_eq!(
            serde_json::to_string(&ex).unwrap(),
            r#"{"id":"a","task":"Conn","features":[1.0],"labels":["Vfdp"],"gre":{"Vfdp":1.5}}"#
        );
    }
}
