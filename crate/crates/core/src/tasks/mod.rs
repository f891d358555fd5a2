//! Graph-QA questions, their instructions and reference answers.

mod generate;
mod instructions;
mod real;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;
use crate::oracles::{self, ParsedAnswer};

pub use generate::{generate_dataset, generate_question, generate_question_with_label, MAX_ATTEMPTS};
pub use instructions::{control_instruction, render_instruction, task_instruction};
pub use real::{link_prediction_questions, node_classification_questions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TaskKind {
    Conn,
    Cyc,
    TS,
    SP,
    MF,
    BGM,
    HP,
    LP,
    NC,
}

impl TaskKind {
    pub const ALL: [TaskKind; 9] = [
        TaskKind::Conn,
        TaskKind::Cyc,
        TaskKind::TS,
        TaskKind::SP,
        TaskKind::MF,
        TaskKind::BGM,
        TaskKind::HP,
        TaskKind::LP,
        TaskKind::NC,
    ];

    /// The seven synthetic algorithmic tasks.
    pub const ALGORITHMIC: [TaskKind; 7] = [
        TaskKind::Conn,
        TaskKind::Cyc,
        TaskKind::TS,
        TaskKind::SP,
        TaskKind::MF,
        TaskKind::BGM,
        TaskKind::HP,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TaskKind::Conn => "Conn",
            TaskKind::Cyc => "Cyc",
            TaskKind::TS => "TS",
            TaskKind::SP => "SP",
            TaskKind::MF => "MF",
            TaskKind::BGM => "BGM",
            TaskKind::HP => "HP",
            TaskKind::LP => "LP",
            TaskKind::NC => "NC",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn is_directed(self) -> bool {
        matches!(self, TaskKind::TS | TaskKind::MF | TaskKind::BGM)
    }

    pub fn is_weighted(self) -> bool {
        matches!(self, TaskKind::SP | TaskKind::MF)
    }

    pub fn is_boolean(self) -> bool {
        matches!(self, TaskKind::Conn | TaskKind::Cyc | TaskKind::LP)
    }
}

impl fmt::Display for TaskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TaskKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TaskKind::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown task {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TaskParams {
    NodeClass {
        target: usize,
        classes: Vec<String>,
        #[serde(deserialize_with = "known_from_json")]
        known: BTreeMap<usize, String>,
    },
    Pair {
        source: usize,
        target: usize,
    },
    None,
}

// Untagged enums buffer map keys as strings, so integer keys are parsed here.
fn known_from_json<'de, D: serde::Deserializer<'de>>(d: D) -> Result<BTreeMap<usize, String>, D::Error> {
    let raw = BTreeMap::<String, String>::deserialize(d)?;
    raw.into_iter()
        .map(|(k, v)| k.parse().map(|k| (k, v)).map_err(serde::de::Error::custom))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum GroundTruth {
    Bool(bool),
    Integer(u64),
    OptimalDistance(u64),
    /// Any ordering or path accepted by the task's checker is correct.
    Checker,
    Class(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Question {
    pub id: String,
    pub task: TaskKind,
    pub graph: Graph,
    pub params: TaskParams,
    pub ground_truth: GroundTruth,
}

#[derive(Debug, Error, PartialEq)]
pub enum TaskError {
    #[error("no valid {task} instance after {attempts} attempts")]
    ValidityExhausted { task: TaskKind, attempts: usize },
    #[error("{0} questions are built from ingested graphs, not generated")]
    NotSynthetic(TaskKind),
    #[error("invalid generator configuration: {0}")]
    Config(String),
    #[error("{0}")]
    Graph(#[from] crate::graph::GraphError),
}

impl Question {
    /// Recomputes the ground truth from the graph and parameters.
    pub fn recompute_ground_truth(&self) -> Option<GroundTruth> {
        let g = &self.graph;
        Some(match (self.task, &self.params) {
            (TaskKind::Conn, TaskParams::Pair { source, target }) => {
                GroundTruth::Bool(oracles::solve_connectivity(g, *source, *target))
            }
            (TaskKind::Cyc, _) => GroundTruth::Bool(oracles::solve_cycle(g)),
            (TaskKind::TS | TaskKind::HP, _) => GroundTruth::Checker,
            (TaskKind::SP, TaskParams::Pair { source, target }) => {
                GroundTruth::OptimalDistance(oracles::solve_shortest_path(g, *source, *target)?.0)
            }
            (TaskKind::MF, TaskParams::Pair { source, target }) => {
                GroundTruth::Integer(oracles::solve_max_flow(g, *source, *target))
            }
            (TaskKind::BGM, _) => GroundTruth::Integer(oracles::solve_bgm(g)? as u64),
            // Link prediction and node classification labels come from
            // held-out data, not from the visible graph.
            (TaskKind::LP | TaskKind::NC, _) => self.ground_truth.clone(),
            _ => return None,
        })
    }

    /// A correct answer, as a reasoner would state it.
    pub fn reference_answer(&self) -> ParsedAnswer {
        let g = &self.graph;
        match (&self.ground_truth, self.task, &self.params) {
            (GroundTruth::Bool(b), _, _) => ParsedAnswer::YesNo(*b),
            (GroundTruth::Integer(v), _, _) => ParsedAnswer::Integer(*v),
            (GroundTruth::Class(c), _, _) => ParsedAnswer::ClassLabel(c.clone()),
            (_, TaskKind::SP, TaskParams::Pair { source, target }) => {
                match oracles::solve_shortest_path(g, *source, *target) {
                    Some((_, path)) => ParsedAnswer::Path(path),
                    None => ParsedAnswer::Malformed(String::new()),
                }
            }
            (_, TaskKind::TS, _) => oracles::kahn_order(g)
                .map(ParsedAnswer::Path)
                .unwrap_or(ParsedAnswer::Malformed(String::new())),
            (_, TaskKind::HP, _) => oracles::solve_hamilton_path(g)
                .map(ParsedAnswer::Path)
                .unwrap_or(ParsedAnswer::Malformed(String::new())),
            _ => ParsedAnswer::Malformed(String::new()),
        }
    }

    /// A well-formed answer that the judge rejects.
    pub fn wrong_answer(&self) -> ParsedAnswer {
        match self.reference_answer() {
            ParsedAnswer::YesNo(b) => ParsedAnswer::YesNo(!b),
            ParsedAnswer::Integer(v) => ParsedAnswer::Integer(v + 1),
            ParsedAnswer::Path(mut p) if p.len() > 1 => {
                p.pop();
                ParsedAnswer::Path(p)
            }
            ParsedAnswer::Path(p) => ParsedAnswer::Path(vec![p.first().map_or(1, |&v| v + 1); 2]),
            ParsedAnswer::ClassLabel(c) => {
                let other = match &self.params {
                    TaskParams::NodeClass { classes, .. } => {
                        classes.iter().find(|k| **k != c).cloned()
                    }
                    _ => None,
                };
                ParsedAnswer::ClassLabel(other.unwrap_or_else(|| format!("{c}0")))
            }
            m @ ParsedAnswer::Malformed(_) => m,
        }
    }
}
