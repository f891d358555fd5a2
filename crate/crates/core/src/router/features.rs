//! Question features read by the router.

use crate::rng::stable_hash;
use crate::tasks::{Question, TaskKind};

/// Instruction words counted as features. Drawn from the task instructions.
pub const VOCABULARY: [&str; 23] = [
    "path",
    "cycle",
    "topological",
    "order",
    "shortest",
    "weight",
    "maximum",
    "flow",
    "capacity",
    "directed",
    "undirected",
    "hosts",
    "tasks",
    "assigned",
    "visits",
    "exactly",
    "once",
    "link",
    "prediction",
    "edge",
    "classification",
    "class",
    "node",
];

const GRAPH_FEATURES: [&str; 6] = ["log_nodes", "log_edges", "density", "directed", "weighted", "bipartite"];

/// Feature names in vector order.
pub fn feature_names() -> Vec<String> {
    TaskKind::ALL
        .iter()
        .map(|t| format!("task:{t}"))
        .chain(GRAPH_FEATURES.iter().map(|s| s.to_string()))
        .chain(VOCABULARY.iter().map(|w| format!("kw:{w}")))
        .collect()
}

pub fn feature_dim() -> usize {
    TaskKind::ALL.len() + GRAPH_FEATURES.len() + VOCABULARY.len()
}

/// Fingerprint of the feature layout; models refuse inputs built under a
/// different one.
pub fn schema_hash() -> String {
    format!("{:016x}", stable_hash(&feature_names().join("\n")))
}

/// Recognizes the task from its instruction text.
pub fn detect_task(instruction: &str) -> Option<TaskKind> {
    let text = instruction.to_lowercase();
    let rules: [(&[&str], TaskKind); 9] = [
        (&["link prediction"], TaskKind::LP),
        (&["node classification"], TaskKind::NC),
        (&["topological order"], TaskKind::TS),
        (&["shortest path"], TaskKind::SP),
        (&["maximum flow"], TaskKind::MF),
        (&["hosts", "tasks"], TaskKind::BGM),
        (&["visits every node exactly once"], TaskKind::HP),
        (&["is there a cycle"], TaskKind::Cyc),
        (&["is there a path between"], TaskKind::Conn),
    ];
    rules
        .iter()
        .find(|(needles, _)| needles.iter().all(|n| text.contains(n)))
        .map(|&(_, task)| task)
}

/// Feature vector for `q` shown with `instruction`. Unknown words are ignored.
pub fn featurize(q: &Question, instruction: &str) -> Vec<f64> {
    let mut x = Vec::with_capacity(feature_dim());
    let task = detect_task(instruction);
    x.extend(TaskKind::ALL.iter().map(|&t| if Some(t) == task { 1.0 } else { 0.0 }));
    let g = &q.graph;
    let flag = |b: bool| if b { 1.0 } else { 0.0 };
    x.push((1.0 + g.node_count() as f64).ln());
    x.push((1.0 + g.edge_count() as f64).ln());
    x.push(g.density());
    x.push(flag(g.is_directed()));
    x.push(flag(g.is_weighted()));
    x.push(flag(g.bipartite_split().is_some()));
    let lower = instruction.to_lowercase();
    let words: Vec<&str> = lower.split(|c: char| !c.is_ascii_alphanumeric()).filter(|w| !w.is_empty()).collect();
    for kw in VOCABULARY {
        let count = words.iter().filter(|w| **w == kw).count();
        x.push((1.0 + count as f64).ln());
    }
    x
}
