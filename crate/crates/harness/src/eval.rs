//! Evaluation of the routed method against the eight fixed-GTR baselines.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use gtr_core::gtr::GtrId;
use gtr_core::preference::{gre, GreParams};
use gtr_core::tasks::{Question, TaskKind};
use serde::{Deserialize, Serialize};

use crate::error::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Method {
    Fixed(GtrId),
    Routed,
}

impl Method {
    /// The eight baselines in pool order, then the router.
    pub fn all() -> Vec<Method> {
        GtrId::POOL.iter().map(|&g| Method::Fixed(g)).chain([Method::Routed]).collect()
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Fixed(g) => write!(f, "fixed:{g}"),
            Method::Routed => f.write_str("routed"),
        }
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.strip_prefix("fixed:") {
            Some(g) => g.parse().map(Method::Fixed),
            None if s == "routed" => Ok(Method::Routed),
            None => Err(format!("unknown method {s:?}")),
        }
    }
}

impl From<Method> for String {
    fn from(m: Method) -> String {
        m.to_string()
    }
}

impl TryFrom<String> for Method {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalCell {
    pub method: Method,
    pub task: TaskKind,
    /// Number of responses aggregated: questions of the task times trials.
    pub responses: usize,
    /// Percent of correct responses.
    pub accuracy: f64,
    pub mean_tokens: f64,
    /// Mean of the per-response GRE.
    pub mean_gre: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Routing {
    pub question_id: String,
    pub task: TaskKind,
    pub gtr: GtrId,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Average {
    pub accuracy: f64,
    pub mean_tokens: f64,
    pub mean_gre: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub gre: GreParams,
    pub trials: usize,
    pub questions: usize,
    pub tasks: Vec<TaskKind>,
    pub cells: Vec<EvalCell>,
    pub routing: Vec<Routing>,
}

/// `(correctness, tokens)` per (question id, GTR, trial).
pub type Outcomes = HashMap<(String, GtrId, usize), (u8, u32)>;

impl EvalReport {
    /// Aggregates outcomes for every method and task. `routing` gives the
    /// routed GTR of each question, in question order.
    pub fn build(
        questions: &[Question],
        routing: Vec<Routing>,
        outcomes: &Outcomes,
        trials: usize,
        params: &GreParams,
    ) -> Result<Self, HarnessError> {
        let routed: HashMap<&str, GtrId> = routing.iter().map(|r| (r.question_id.as_str(), r.gtr)).collect();
        let mut tasks: Vec<TaskKind> = questions.iter().map(|q| q.task).collect();
        tasks.sort();
        tasks.dedup();
        let mut cells = Vec::new();
        for method in Method::all() {
            for &task in &tasks {
                let (mut n, mut correct, mut tokens, mut score) = (0usize, 0u64, 0f64, 0f64);
                for q in questions.iter().filter(|q| q.task == task) {
                    let gtr = match method {
                        Method::Fixed(g) => g,
                        Method::Routed => *routed
                            .get(q.id.as_str())
                            .ok_or_else(|| HarnessError::Data(format!("{} was not routed", q.id)))?,
                    };
                    for trial in 0..trials {
                        let &(c, t) = outcomes
                            .get(&(q.id.clone(), gtr, trial))
                            .ok_or_else(|| HarnessError::Data(format!("no response for {}/{gtr}/{trial}", q.id)))?;
                        n += 1;
                        correct += c as u64;
                        tokens += t as f64;
                        score += gre(c, t as u64, params).map_err(|e| HarnessError::Data(e.to_string()))?;
                    }
                }
                let nf = n as f64;
                cells.push(EvalCell {
                    method,
                    task,
                    responses: n,
                    accuracy: 100.0 * correct as f64 / nf,
                    mean_tokens: tokens / nf,
                    mean_gre: score / nf,
                });
            }
        }
        Ok(EvalReport { gre: *params, trials, questions: questions.len(), tasks, cells, routing })
    }

    pub fn cell(&self, method: Method, task: TaskKind) -> Option<&EvalCell> {
        self.cells.iter().find(|c| c.method == method && c.task == task)
    }

    /// Unweighted mean over tasks.
    pub fn macro_average(&self, method: Method) -> Option<Average> {
        let cells: Vec<&EvalCell> = self.cells.iter().filter(|c| c.method == method).collect();
        if cells.is_empty() {
            return None;
        }
        let n = cells.len() as f64;
        let mean = |f: fn(&EvalCell) -> f64| cells.iter().map(|c| f(c)).sum::<f64>() / n;
        Some(Average { accuracy: mean(|c| c.accuracy), mean_tokens: mean(|c| c.mean_tokens), mean_gre: mean(|c| c.mean_gre) })
    }

    /// Acc and Tok per task per method, followed by the macro averages.
    pub fn to_markdown(&self) -> String {
        let mut out = format!(
            "{} questions, {} trials per method, alpha = {}\n\n| Method |",
            self.questions, self.trials, self.gre.alpha
        );
        for t in &self.tasks {
            out.push_str(&format!(" {t} Acc | {t} Tok |"));
        }
        out.push_str(" Avg Acc | Avg Tok | Avg GRE |\n|---|");
        out.push_str(&"---:|".repeat(2 * self.tasks.len() + 3));
        out.push('\n');
        for m in Method::all() {
            out.push_str(&format!("| {m} |"));
            for &t in &self.tasks {
                match self.cell(m, t) {
                    Some(c) => out.push_str(&format!(" {:.1} | {:.1} |", c.accuracy, c.mean_tokens)),
                    None => out.push_str(" - | - |"),
                }
            }
            if let Some(a) = self.macro_average(m) {
                out.push_str(&format!(" {:.1} | {:.1} | {:.3} |", a.accuracy, a.mean_tokens, a.mean_gre));
            }
            out.push('\n');
        }
        out
    }

    /// Long format, one row per (method, task) plus a `macro` row per method.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("method\ttask\tresponses\taccuracy\tmean_tokens\tmean_gre\n");
        for m in Method::all() {
            for c in self.cells.iter().filter(|c| c.method == m) {
                out.push_str(&format!(
                    "{m}\t{}\t{}\t{:.4}\t{:.4}\t{:.6}\n",
                    c.task, c.responses, c.accuracy, c.mean_tokens, c.mean_gre
                ));
            }
            if let Some(a) = self.macro_average(m) {
                let n: usize = self.cells.iter().filter(|c| c.method == m).map(|c| c.responses).sum();
                out.push_str(&format!("{m}\tmacro\t{n}\t{:.4}\t{:.4}\t{:.6}\n", a.accuracy, a.mean_tokens, a.mean_gre));
            }
        }
        out
    }
}
