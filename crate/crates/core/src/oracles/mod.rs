//! Exact solvers and answer checkers for the algorithmic tasks.

mod answer;
mod solvers;

pub use answer::{extract_answer, judge, last_answer_span, ParsedAnswer};
pub use solvers::{
    check_hamilton_path, check_shortest_path_answer, check_topological_order, has_directed_cycle,
    kahn_order, path_weight, search_hamilton_path, solve_bgm, solve_connectivity, solve_cycle,
    solve_hamilton_path, solve_max_flow, solve_shortest_path, HamiltonSearch, UnionFind,
};
