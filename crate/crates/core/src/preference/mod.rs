//! GRE scoring and construction of the GTR preference dataset.
//!
//! GRE trades correctness against response length:
//! `ln(1 + 100·correct) − α·ln(tokens)`. A question's preferred GTRs are
//! those whose mean GRE over `k` trials attains the maximum; ties keep
//! every tied GTR as a label.

mod dataset;
mod report;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gtr::GtrId;

pub use dataset::{build_gtrp, probe_question, rebuild_from_cache, GtrpBuild, PreferenceExample, ProbeRecord};
pub use report::{preference_report, PreferenceReport, TaskPreference};

pub const DEFAULT_ALPHA: f64 = 0.5;
pub const DEFAULT_TIE_EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogBase {
    #[default]
    Natural,
    Two,
}

impl LogBase {
    fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Natural => x.ln(),
            LogBase::Two => x.log2(),
        }
    }
}

/// How the `k` trials of one GTR are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    /// Score every trial, then average the scores.
    #[default]
    MeanOfScores,
    /// Average correctness and tokens first, then score once.
    ScoreOfMeans,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GreParams {
    pub alpha: f64,
    #[serde(default)]
    pub log_base: LogBase,
    #[serde(default)]
    pub aggregation: Aggregation,
}

impl Default for GreParams {
    fn default() -> Self {
        GreParams { alpha: DEFAULT_ALPHA, log_base: LogBase::Natural, aggregation: Aggregation::MeanOfScores }
    }
}

impl GreParams {
    pub fn with_alpha(alpha: f64) -> Self {
        GreParams { alpha, ..Default::default() }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PreferenceError {
    #[error("GRE undefined: {0}")]
    Domain(String),
    #[error("question {question}: {gtr} has {found} of {expected} trials")]
    MissingRecords { question: String, gtr: GtrId, found: usize, expected: usize },
}

fn score(correctness: f64, tokens: f64, params: &GreParams) -> Result<f64, PreferenceError> {
    if !(tokens >= 1.0) {
        return Err(PreferenceError::Domain(format!("token count {tokens} is below 1")));
    }
    if !(0.0..=1.0).contains(&correctness) {
        return Err(PreferenceError::Domain(format!("correctness {correctness} outside [0, 1]")));
    }
    if !(params.alpha >= 0.0) {
        return Err(PreferenceError::Domain(format!("alpha {} is negative", params.alpha)));
    }
    let log = |x| params.log_base.log(x);
    Ok(log(1.0 + 100.0 * correctness) - params.alpha * log(tokens))
}

/// GRE of a single response.
pub fn gre(correctness: u8, tokens: u64, params: &GreParams) -> Result<f64, PreferenceError> {
    if correctness > 1 {
        return Err(PreferenceError::Domain(format!("correctness {correctness} is not 0 or 1")));
    }
    score(correctness as f64, tokens as f64, params)
}

/// Mean GRE per GTR over trials `0..k`. Every GTR of the pool needs all `k`
/// trials; extra trials beyond `k` are ignored and duplicates keep the
/// first record.
pub fn mean_gre_per_gtr(
    records: &[ProbeRecord],
    k: usize,
    params: &GreParams,
) -> Result<BTreeMap<GtrId, f64>, PreferenceError> {
    let question = records.first().map(|r| r.question_id.clone()).unwrap_or_default();
    let mut cells: BTreeMap<GtrId, BTreeMap<usize, &ProbeRecord>> = BTreeMap::new();
    for r in records.iter().filter(|r| r.trial < k) {
        cells.entry(r.gtr).or_default().entry(r.trial).or_insert(r);
    }
    let mut table = BTreeMap::new();
    for gtr in GtrId::POOL {
        let trials = cells.get(&gtr).map(|c| c.values().copied().collect::<Vec<_>>()).unwrap_or_default();
        if trials.len() != k || k == 0 {
            return Err(PreferenceError::MissingRecords {
                question: question.clone(),
                gtr,
                found: trials.len(),
                expected: k,
            });
        }
        let value = match params.aggregation {
            Aggregation::MeanOfScores => {
                let mut sum = 0.0;
                for r in &trials {
                    sum += score(r.correctness as f64, r.tokens as f64, params)?;
                }
                sum / k as f64
            }
            Aggregation::ScoreOfMeans => {
                let acc = trials.iter().map(|r| r.correctness as f64).sum::<f64>() / k as f64;
                let tok = trials.iter().map(|r| r.tokens as f64).sum::<f64>() / k as f64;
                score(acc, tok, params)?
            }
        };
        table.insert(gtr, value);
    }
    Ok(table)
}

/// GTRs whose score is within `tie_epsilon` of the best.
pub fn preferred_set(table: &BTreeMap<GtrId, f64>, tie_epsilon: f64) -> BTreeSet<GtrId> {
    let best = table.values().copied().fold(f64::NEG_INFINITY, f64::max);
    table.iter().filter(|(_, &v)| best - v <= tie_epsilon).map(|(&g, _)| g).collect()
}
