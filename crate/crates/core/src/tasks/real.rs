//! Link-prediction and node-classification questions over ingested graphs.
//!
//! Large graphs are cut down to the k-hop neighborhood of the queried node
//! before being shown to a reasoner.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng as _;

use super::{GroundTruth, Question, TaskError, TaskKind, TaskParams};
use crate::graph::{extract_khop_subgraph, Edge, Graph};
use crate::rng::rng_from_seed;

/// Builds `count` link-prediction questions, alternating a held-out true
/// edge (answer yes) and a non-adjacent pair inside the neighborhood
/// (answer no). The held-out edge is removed from the shown subgraph.
pub fn link_prediction_questions(
    g: &Graph,
    count: usize,
    hops: usize,
    max_nodes: usize,
    seed: u64,
    prefix: &str,
) -> Result<Vec<Question>, TaskError> {
    let mut rng = rng_from_seed(seed);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count {
        attempts += 1;
        if attempts > super::MAX_ATTEMPTS * count.max(1) {
            return Err(TaskError::ValidityExhausted { task: TaskKind::LP, attempts });
        }
        let positive = out.len() % 2 == 0;
        let (u, v, shown) = if positive {
            let Some(edge) = g.edges().choose(&mut rng) else {
                return Err(TaskError::ValidityExhausted { task: TaskKind::LP, attempts });
            };
            let kept: Vec<Edge> = g.edges().iter().filter(|e| *e != edge).copied().collect();
            let shown = Graph::new(g.node_count(), g.is_directed(), kept, None)?;
            (edge.u, edge.v, shown)
        } else {
            let u = rng.gen_range(0..g.node_count());
            let v = rng.gen_range(0..g.node_count());
            if u == v || g.has_edge(u, v) || g.has_edge(v, u) {
                continue;
            }
            (u, v, g.clone())
        };
        let sub = extract_khop_subgraph(&shown, u, hops, max_nodes)?;
        let Some(&target) = sub.old_to_new.get(&v) else {
            continue;
        };
        out.push(Question {
            id: format!("{prefix}LP-{:05}", out.len()),
            task: TaskKind::LP,
            graph: sub.graph,
            params: TaskParams::Pair { source: 0, target },
            ground_truth: GroundTruth::Bool(positive),
        });
    }
    Ok(out)
}

/// Builds `count` node-classification questions. `labels` maps node id to
/// class index; every other labeled node in the neighborhood is shown as a
/// known class. Class names are `Class k`.
pub fn node_classification_questions(
    g: &Graph,
    labels: &BTreeMap<usize, usize>,
    count: usize,
    hops: usize,
    max_nodes: usize,
    seed: u64,
    prefix: &str,
) -> Result<Vec<Question>, TaskError> {
    let labeled: Vec<usize> = labels.keys().copied().filter(|&v| g.contains_node(v)).collect();
    if labeled.is_empty() {
        return Err(TaskError::ValidityExhausted { task: TaskKind::NC, attempts: 0 });
    }
    let classes: Vec<String> = labels
        .values()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .map(|k| format!("Class {k}"))
        .collect();
    let mut rng = rng_from_seed(seed);
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let node = *labeled.choose(&mut rng).expect("non-empty");
        let sub = extract_khop_subgraph(g, node, hops, max_nodes)?;
        let known = sub
            .new_to_old
            .iter()
            .enumerate()
            .skip(1)
            .filter_map(|(new, old)| labels.get(old).map(|k| (new, format!("Class {k}"))))
            .collect();
        out.push(Question {
            id: format!("{prefix}NC-{i:05}"),
            task: TaskKind::NC,
            graph: sub.graph,
            params: TaskParams::NodeClass { target: 0, classes: classes.clone(), known },
            ground_truth: GroundTruth::Class(format!("Class {}", labels[&node])),
        });
    }
    Ok(out)
}
