use rand::seq::SliceRandom;

use super::{GroundTruth, Question, TaskError, TaskKind, TaskParams};
use crate::graph::{generate_bipartite_graph, generate_er_graph, Edge, ErConfig, Graph};
use crate::oracles::{self, HamiltonSearch};
use crate::rng::{derive_seed, rng_from_seed, Rng};

/// Resampling cap per question.
pub const MAX_ATTEMPTS: usize = 10_000;

/// Backtracking budget when checking Hamilton-path validity. Graphs whose
/// search exceeds it are treated as invalid and resampled.
const HAMILTON_EXPANSIONS: u64 = 200_000;

/// Generates one valid question of an algorithmic task.
pub fn generate_question(task: TaskKind, cfg: &ErConfig, seed: u64) -> Result<Question, TaskError> {
    generate_question_with_label(task, cfg, seed, None)
}

/// Like [`generate_question`], additionally resampling boolean tasks until
/// the ground truth equals `label` (ignored for non-boolean tasks).
pub fn generate_question_with_label(
    task: TaskKind,
    cfg: &ErConfig,
    seed: u64,
    label: Option<bool>,
) -> Result<Question, TaskError> {
    if !TaskKind::ALGORITHMIC.contains(&task) {
        return Err(TaskError::NotSynthetic(task));
    }
    cfg.validate().map_err(TaskError::Config)?;
    let label = if task.is_boolean() { label } else { None };
    for attempt in 0..MAX_ATTEMPTS {
        let attempt_seed = derive_seed(seed, &format!("attempt/{attempt}"));
        let mut rng = rng_from_seed(derive_seed(attempt_seed, "params"));
        if let Some((graph, params, ground_truth)) =
            try_instance(task, &cfg.with_seed(attempt_seed), &mut rng, label)
        {
            return Ok(Question {
                id: format!("{task}-{seed:016x}"),
                task,
                graph,
                params,
                ground_truth,
            });
        }
    }
    Err(TaskError::ValidityExhausted {
        task,
        attempts: MAX_ATTEMPTS,
    })
}

/// Samples an ordered pair `s != t` uniformly among those accepted by `keep`.
fn pick_pair(n: usize, rng: &mut Rng, mut keep: impl FnMut(usize, usize) -> bool) -> Option<(usize, usize)> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|s| (0..n).filter(move |&t| t != s).map(move |t| (s, t)))
        .filter(|&(s, t)| keep(s, t))
        .collect();
    pairs.choose(rng).copied()
}

/// Random DAG: an undirected `G(N, p)` oriented along a random node order.
fn random_dag(cfg: &ErConfig, rng: &mut Rng) -> Graph {
    let skeleton = generate_er_graph(cfg, false, false);
    let n = skeleton.node_count();
    let mut rank: Vec<usize> = (0..n).collect();
    rank.shuffle(rng);
    let edges = skeleton
        .edges()
        .iter()
        .map(|e| {
            if rank[e.u] < rank[e.v] {
                Edge::new(e.u, e.v)
            } else {
                Edge::new(e.v, e.u)
            }
        })
        .collect();
    Graph::new(n, true, edges, None).expect("orientation preserves validity")
}

fn try_instance(
    task: TaskKind,
    cfg: &ErConfig,
    rng: &mut Rng,
    label: Option<bool>,
) -> Option<(Graph, TaskParams, GroundTruth)> {
    match task {
        TaskKind::Conn => {
            let g = generate_er_graph(cfg, false, false);
            let mut uf = oracles::UnionFind::new(g.node_count());
            for e in g.edges() {
                uf.union(e.u, e.v);
            }
            let (s, t) = pick_pair(g.node_count(), rng, |s, t| {
                label.map_or(true, |want| (uf.find(s) == uf.find(t)) == want)
            })?;
            let truth = oracles::solve_connectivity(&g, s, t);
            Some((g, TaskParams::Pair { source: s, target: t }, GroundTruth::Bool(truth)))
        }
        TaskKind::Cyc => {
            let g = generate_er_graph(cfg, false, false);
            let truth = oracles::solve_cycle(&g);
            if label.is_some_and(|want| want != truth) {
                return None;
            }
            Some((g, TaskParams::None, GroundTruth::Bool(truth)))
        }
        TaskKind::TS => {
            let g = random_dag(cfg, rng);
            if oracles::has_directed_cycle(&g) {
                return None;
            }
            Some((g, TaskParams::None, GroundTruth::Checker))
        }
        TaskKind::SP => {
            let g = generate_er_graph(cfg, false, true);
            let mut uf = oracles::UnionFind::new(g.node_count());
            for e in g.edges() {
                uf.union(e.u, e.v);
            }
            let (s, t) = pick_pair(g.node_count(), rng, |s, t| uf.find(s) == uf.find(t))?;
            let (dist, _) = oracles::solve_shortest_path(&g, s, t)?;
            Some((
                g,
                TaskParams::Pair { source: s, target: t },
                GroundTruth::OptimalDistance(dist),
            ))
        }
        TaskKind::MF => {
            let g = generate_er_graph(cfg, true, true);
            let reach = reachability(&g);
            let (s, t) = pick_pair(g.node_count(), rng, |s, t| reach[s][t])?;
            let flow = oracles::solve_max_flow(&g, s, t);
            if flow == 0 {
                return None;
            }
            Some((g, TaskParams::Pair { source: s, target: t }, GroundTruth::Integer(flow)))
        }
        TaskKind::BGM => {
            let g = generate_bipartite_graph(cfg);
            if g.edge_count() == 0 {
                return None;
            }
            let matching = oracles::solve_bgm(&g)? as u64;
            Some((g, TaskParams::None, GroundTruth::Integer(matching)))
        }
        TaskKind::HP => {
            let g = generate_er_graph(cfg, false, false);
            match oracles::search_hamilton_path(&g, HAMILTON_EXPANSIONS) {
                HamiltonSearch::Found(_) => Some((g, TaskParams::None, GroundTruth::Checker)),
                _ => None,
            }
        }
        TaskKind::LP | TaskKind::NC => None,
    }
}

fn reachability(g: &Graph) -> Vec<Vec<bool>> {
    let adj = g.adjacency();
    (0..g.node_count())
        .map(|s| {
            let mut seen = vec![false; g.node_count()];
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                for &(v, _) in &adj[u] {
                    if !seen[v] {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
            seen
        })
        .collect()
}

/// Generates `per_task` questions for each task in `tasks`.
///
/// Boolean tasks alternate the requested label (even index: yes, odd: no),
/// so their positive rate is 50% up to one question. Question `i` of task
/// `t` uses the seed derived from `root_seed` and `"{t}/{i}"`, and is named
/// `{prefix}{t}-{i:05}`.
pub fn generate_dataset(
    tasks: &[TaskKind],
    per_task: usize,
    cfg: &ErConfig,
    root_seed: u64,
    prefix: &str,
) -> Result<Vec<Question>, TaskError> {
    let mut out = Vec::with_capacity(tasks.len() * per_task);
    for &task in tasks {
        for i in 0..per_task {
            let seed = derive_seed(root_seed, &format!("{task}/{i}"));
            let label = task.is_boolean().then_some(i % 2 == 0);
            let mut q = generate_question_with_label(task, cfg, seed, label)?;
            q.id = format!("{prefix}{task}-{i:05}");
            out.push(q);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::ParsedAnswer;

    #[test]
    fn every_task_yields_consistent_ground_truth() {
        let cfg = ErConfig::default();
        for task in TaskKind::ALGORITHMIC {
            for seed in 0..20 {
                let q = generate_question(task, &cfg, seed).unwrap();
                assert_eq!(q.recompute_ground_truth().as_ref(), Some(&q.ground_truth), "{task}");
                assert_eq!(q.graph.is_directed(), task.is_directed(), "{task}");
                assert_eq!(q.graph.is_weighted(), task.is_weighted() && q.graph.edge_count() > 0);
                let reference = q.reference_answer();
                assert_eq!(crate::oracles::judge(&q, &reference), 1, "{task} {reference:?}");
                assert_eq!(crate::oracles::judge(&q, &q.wrong_answer()), 0, "{task}");
            }
        }
    }

    #[test]
    fn topological_sort_graphs_are_acyclic() {
        for seed in 0..50 {
            let q = generate_question(TaskKind::TS, &ErConfig::default(), seed).unwrap();
            assert!(!oracles::has_directed_cycle(&q.graph));
        }
    }

    #[test]
    fn complete_triangle_hamilton_paths() {
        let cfg = ErConfig {
            node_range: (3, 3),
            edge_probability_range: (1.0, 1.0),
            ..ErConfig::default()
        };
        let q = generate_question(TaskKind::HP, &cfg, 3).unwrap();
        assert_eq!(crate::oracles::judge(&q, &ParsedAnswer::Path(vec![0, 1, 2])), 1);
        assert_eq!(crate::oracles::judge(&q, &ParsedAnswer::Path(vec![0, 2, 1])), 1);
    }

    #[test]
    fn impossible_validity_is_reported() {
        // With p = 0 no Hamilton path exists on three nodes.
        let cfg = ErConfig {
            node_range: (3, 3),
            edge_probability_range: (0.0, 0.0),
            ..ErConfig::default()
        };
        assert_eq!(
            generate_question(TaskKind::HP, &cfg, 1),
            Err(TaskError::ValidityExhausted {
                task: TaskKind::HP,
                attempts: MAX_ATTEMPTS
            })
        );
    }

    #[test]
    fn real_world_tasks_are_not_generated() {
        assert_eq!(
            generate_question(TaskKind::NC, &ErConfig::default(), 0),
            Err(TaskError::NotSynthetic(TaskKind::NC))
        );
    }

    #[test]
    fn boolean_tasks_are_balanced() {
        let qs = generate_dataset(&[TaskKind::Conn, TaskKind::Cyc], 40, &ErConfig::default(), 11, "")
            .unwrap();
        for task in [TaskKind::Conn, TaskKind::Cyc] {
            let yes = qs
                .iter()
                .filter(|q| q.task == task && q.ground_truth == GroundTruth::Bool(true))
                .count();
            assert_eq!(yes, 20);
        }
    }

    #[test]
    fn dataset_is_deterministic_and_named() {
        let a = generate_dataset(&[TaskKind::SP], 3, &ErConfig::default(), 5, "x-").unwrap();
        let b = generate_dataset(&[TaskKind::SP], 3, &ErConfig::default(), 5, "x-").unwrap();
        assert_eq!(a, b);
        assert_eq!(a[2].id, "x-SP-00002");
    }
}
