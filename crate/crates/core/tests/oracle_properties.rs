use gtr_core::graph::{generate_er_graph, ErConfig, Graph};
use gtr_core::oracles::{
    check_hamilton_path, check_shortest_path_answer, check_topological_order, extract_answer, judge, kahn_order,
    solve_max_flow, solve_shortest_path, ParsedAnswer,
};
use gtr_core::rng::derive_seed;
use gtr_core::tasks::{generate_question, TaskKind, TaskParams};
use proptest::prelude::*;

/// Minimum capacity over every s–t cut, by subset enumeration.
fn brute_min_cut(g: &Graph, s: usize, t: usize) -> u64 {
    let n = g.node_count();
    let mut best = u64::MAX;
    for mask in 0u32..(1 << n) {
        let inside = |v: usize| mask & (1 << v) != 0;
        if !inside(s) || inside(t) {
            continue;
        }
        let mut cut = 0;
        for e in g.edges() {
            let w = e.cost();
            if inside(e.u) && !inside(e.v) {
                cut += w;
            }
            if !g.is_directed() && inside(e.v) && !inside(e.u) {
                cut += w;
            }
        }
        best = best.min(cut);
    }
    best
}

#[test]
fn max_flow_equals_min_cut() {
    let cfg = ErConfig { node_range: (2, 8), ..Default::default() };
    for i in 0..1000u64 {
        let seed = derive_seed(17, &i.to_string());
        let directed = i % 4 != 0;
        let g = generate_er_graph(&cfg.with_seed(seed), directed, true);
        let n = g.node_count();
        let (s, t) = ((seed % n as u64) as usize, ((seed / 7) % n as u64) as usize);
        if s == t {
            continue;
        }
        assert_eq!(solve_max_flow(&g, s, t), brute_min_cut(&g, s, t), "case {i}");
    }
}

#[test]
fn topological_witness_rejects_swapped_edges() {
    for seed in 0..300 {
        let q = generate_question(TaskKind::TS, &ErConfig::default(), seed).unwrap();
        let order = kahn_order(&q.graph).unwrap();
        assert!(check_topological_order(&q.graph, &order));
        if let Some(e) = q.graph.edges().first() {
            let mut swapped = order.clone();
            let a = swapped.iter().position(|&v| v == e.u).unwrap();
            let b = swapped.iter().position(|&v| v == e.v).unwrap();
            swapped.swap(a, b);
            assert!(!check_topological_order(&q.graph, &swapped));
        }
        let mut short = order.clone();
        short.pop();
        assert!(!check_topological_order(&q.graph, &short));
    }
}

#[test]
fn shortest_path_witness_rejects_perturbations() {
    for seed in 0..300 {
        let q = generate_question(TaskKind::SP, &ErConfig::default(), seed).unwrap();
        let TaskParams::Pair { source, target } = q.params else { panic!("SP has a pair") };
        let (_, path) = solve_shortest_path(&q.graph, source, target).unwrap();
        assert!(check_shortest_path_answer(&q.graph, source, target, &path));
        let mut truncated = path.clone();
        truncated.pop();
        assert!(!check_shortest_path_answer(&q.graph, source, target, &truncated));
        // any swap of two hops either breaks adjacency or the endpoints
        if path.len() >= 3 {
            let mut swapped = path.clone();
            swapped.swap(0, 1);
            assert!(!check_shortest_path_answer(&q.graph, source, target, &swapped));
        }
    }
}

#[test]
fn hamilton_witness_rejects_perturbations() {
    for seed in 0..200 {
        let q = generate_question(TaskKind::HP, &ErConfig::default(), seed).unwrap();
        let ParsedAnswer::Path(path) = q.reference_answer() else { panic!("HP answer is a path") };
        assert!(check_hamilton_path(&q.graph, &path));
        let mut repeated = path.clone();
        *repeated.last_mut().unwrap() = path[0];
        assert!(!check_hamilton_path(&q.graph, &repeated));
        let mut rotated = path.clone();
        rotated.rotate_left(1);
        assert!(!check_hamilton_path(&q.graph, &rotated), "paths must start at node 0");
    }
}

#[test]
fn integer_answers_off_by_one_are_wrong() {
    for task in [TaskKind::MF, TaskKind::BGM] {
        for seed in 0..100 {
            let q = generate_question(task, &ErConfig::default(), seed).unwrap();
            let ParsedAnswer::Integer(v) = q.reference_answer() else { panic!("integer task") };
            assert_eq!(judge(&q, &ParsedAnswer::Integer(v)), 1);
            assert_eq!(judge(&q, &ParsedAnswer::Integer(v + 1)), 0);
            if v > 0 {
                assert_eq!(judge(&q, &ParsedAnswer::Integer(v - 1)), 0);
            }
        }
    }
}

fn answer_for(task: TaskKind) -> BoxedStrategy<ParsedAnswer> {
    match task {
        TaskKind::Conn | TaskKind::Cyc | TaskKind::LP => any::<bool>().prop_map(ParsedAnswer::YesNo).boxed(),
        TaskKind::TS | TaskKind::SP | TaskKind::HP => {
            prop::collection::vec(0usize..100, 1..12).prop_map(ParsedAnswer::Path).boxed()
        }
        TaskKind::MF | TaskKind::BGM => any::<u64>().prop_map(ParsedAnswer::Integer).boxed(),
        TaskKind::NC => (0u32..50).prop_map(|k| ParsedAnswer::ClassLabel(format!("Class {k}"))).boxed(),
    }
}

proptest! {
    #[test]
    fn rendered_answers_extract_back(
        (task, answer) in prop::sample::select(TaskKind::ALL.to_vec()).prop_flat_map(|t| (Just(t), answer_for(t))),
        prefix in "[a-z ]{0,20}",
    ) {
        let raw = format!("{prefix}<answer>wrong</answer> then <answer>{}</answer>", answer.render());
        prop_assert_eq!(extract_answer(&raw, task), answer);
    }

    #[test]
    fn text_without_tags_is_malformed(raw in "[^<>]{0,40}", t in 0usize..9) {
        prop_assert!(extract_answer(&raw, TaskKind::ALL[t]).is_malformed());
    }
}
