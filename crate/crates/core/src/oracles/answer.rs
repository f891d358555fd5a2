use serde::{Deserialize, Serialize};

use super::solvers::{check_hamilton_path, check_shortest_path_answer, check_topological_order};
use crate::tasks::{GroundTruth, Question, TaskKind, TaskParams};

const OPEN: &str = "<answer>";
const CLOSE: &str = "</answer>";

/// An answer extracted from a reasoner response.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum ParsedAnswer {
    YesNo(bool),
    Path(Vec<usize>),
    Integer(u64),
    ClassLabel(String),
    Malformed(String),
}

impl PartialEq for ParsedAnswer {
    fn eq(&self, other: &Self) -> bool {
        use ParsedAnswer::*;
        match (self, other) {
            (YesNo(a), YesNo(b)) => a == b,
            (Path(a), Path(b)) => a == b,
            (Integer(a), Integer(b)) => a == b,
            (ClassLabel(a), ClassLabel(b)) => a == b,
            _ => false,
        }
    }
}

impl ParsedAnswer {
    pub fn is_malformed(&self) -> bool {
        matches!(self, ParsedAnswer::Malformed(_))
    }

    /// Text placed between the answer tags when emitting this answer.
    pub fn render(&self) -> String {
        match self {
            ParsedAnswer::YesNo(true) => "Yes".into(),
            ParsedAnswer::YesNo(false) => "No".into(),
            ParsedAnswer::Path(p) => p.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("->"),
            ParsedAnswer::Integer(v) => v.to_string(),
            ParsedAnswer::ClassLabel(c) => c.clone(),
            ParsedAnswer::Malformed(raw) => raw.clone(),
        }
    }
}

/// Content of the last complete `<answer>…</answer>` span, trimmed.
pub fn last_answer_span(raw: &str) -> Option<&str> {
    let close = raw.rfind(CLOSE)?;
    let open = raw[..close].rfind(OPEN)?;
    Some(raw[open + OPEN.len()..close].trim())
}

fn strip_edge_punctuation(s: &str) -> &str {
    s.trim_matches(|c: char| !c.is_alphanumeric())
}

fn parse_yes_no(s: &str) -> Option<bool> {
    match strip_edge_punctuation(s).to_ascii_lowercase().as_str() {
        "yes" => Some(true),
        "no" => Some(false),
        _ => None,
    }
}

fn parse_path(s: &str) -> Option<Vec<usize>> {
    let s = s.trim().trim_end_matches('.').trim();
    if s.is_empty() {
        return None;
    }
    s.split("->").map(|tok| tok.trim().parse::<usize>().ok()).collect()
}

fn parse_integer(s: &str) -> Option<u64> {
    s.trim().trim_end_matches('.').trim().parse::<u64>().ok()
}

fn parse_class(s: &str) -> Option<String> {
    let s = strip_edge_punctuation(s);
    let mut parts = s.split_whitespace();
    let word = parts.next()?;
    let number = parts.next()?;
    if parts.next().is_some() || !word.eq_ignore_ascii_case("class") {
        return None;
    }
    let k: u64 = number.parse().ok()?;
    Some(format!("Class {k}"))
}

/// Takes the last answer span and parses it according to `task`.
pub fn extract_answer(raw: &str, task: TaskKind) -> ParsedAnswer {
    let Some(span) = last_answer_span(raw) else {
        return ParsedAnswer::Malformed(raw.to_string());
    };
    let parsed = match task {
        TaskKind::Conn | TaskKind::Cyc | TaskKind::LP => parse_yes_no(span).map(ParsedAnswer::YesNo),
        TaskKind::TS | TaskKind::SP | TaskKind::HP => parse_path(span).map(ParsedAnswer::Path),
        TaskKind::MF | TaskKind::BGM => parse_integer(span).map(ParsedAnswer::Integer),
        TaskKind::NC => parse_class(span).map(ParsedAnswer::ClassLabel),
    };
    parsed.unwrap_or_else(|| ParsedAnswer::Malformed(span.to_string()))
}

/// Correctness bit for `answer` against `q`.
pub fn judge(q: &Question, answer: &ParsedAnswer) -> u8 {
    let g = &q.graph;
    let ok = match (q.task, answer, &q.ground_truth) {
        (_, ParsedAnswer::Malformed(_), _) => false,
        (TaskKind::Conn | TaskKind::Cyc | TaskKind::LP, ParsedAnswer::YesNo(a), GroundTruth::Bool(b)) => {
            a == b
        }
        (TaskKind::TS, ParsedAnswer::Path(order), _) => check_topological_order(g, order),
        (TaskKind::SP, ParsedAnswer::Path(path), _) => match q.params {
            TaskParams::Pair { source, target } => check_shortest_path_answer(g, source, target, path),
            _ => false,
        },
        (TaskKind::HP, ParsedAnswer::Path(path), _) => check_hamilton_path(g, path),
        (TaskKind::MF | TaskKind::BGM, ParsedAnswer::Integer(a), GroundTruth::Integer(b)) => a == b,
        (TaskKind::NC, ParsedAnswer::ClassLabel(a), GroundTruth::Class(b)) => a == b,
        _ => false,
    };
    u8::from(ok)
}
