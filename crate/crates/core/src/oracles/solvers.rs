use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use crate::graph::Graph;

/// Disjoint-set forest with path compression and union by rank.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    /// Returns false if `a` and `b` were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

/// Whether `u` and `v` share a (weakly) connected component.
pub fn solve_connectivity(g: &Graph, u: usize, v: usize) -> bool {
    let mut uf = UnionFind::new(g.node_count());
    for e in g.edges() {
        uf.union(e.u, e.v);
    }
    uf.find(u) == uf.find(v)
}

/// Undirected cycle detection by DFS with parent tracking. Direction is
/// ignored; see [`has_directed_cycle`] for the directed notion.
pub fn solve_cycle(g: &Graph) -> bool {
    let adj = g.undirected_adjacency();
    let mut visited = vec![false; g.node_count()];
    for root in 0..g.node_count() {
        if visited[root] {
            continue;
        }
        visited[root] = true;
        let mut stack = vec![(root, usize::MAX)];
        while let Some((node, parent)) = stack.pop() {
            for &next in &adj[node] {
                if next == parent {
                    continue;
                }
                if visited[next] {
                    return true;
                }
                visited[next] = true;
                stack.push((next, node));
            }
        }
    }
    false
}

/// Kahn's algorithm; `None` if the graph has a directed cycle. Ready nodes
/// are taken in ascending id order.
pub fn kahn_order(g: &Graph) -> Option<Vec<usize>> {
    let n = g.node_count();
    let mut indegree = vec![0usize; n];
    for e in g.edges() {
        indegree[e.v] += 1;
    }
    let adj = g.adjacency();
    let mut ready: BinaryHeap<Reverse<usize>> =
        (0..n).filter(|&v| indegree[v] == 0).map(Reverse).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(Reverse(u)) = ready.pop() {
        order.push(u);
        for &(v, _) in &adj[u] {
            indegree[v] -= 1;
            if indegree[v] == 0 {
                ready.push(Reverse(v));
            }
        }
    }
    (order.len() == n).then_some(order)
}

pub fn has_directed_cycle(g: &Graph) -> bool {
    kahn_order(g).is_none()
}

/// True iff `order` is a permutation of all nodes and every arc `u → v`
/// has `u` before `v`.
pub fn check_topological_order(g: &Graph, order: &[usize]) -> bool {
    let n = g.node_count();
    if order.len() != n {
        return false;
    }
    let mut position = vec![usize::MAX; n];
    for (i, &node) in order.iter().enumerate() {
        if node >= n || position[node] != usize::MAX {
            return false;
        }
        position[node] = i;
    }
    g.edges().iter().all(|e| position[e.u] < position[e.v])
}

/// Dijkstra from `s`; returns the optimal distance to `t` and one optimal
/// path, or `None` when `t` is unreachable.
pub fn solve_shortest_path(g: &Graph, s: usize, t: usize) -> Option<(u64, Vec<usize>)> {
    let n = g.node_count();
    if s >= n || t >= n {
        return None;
    }
    let adj = g.adjacency();
    let mut dist = vec![u64::MAX; n];
    let mut prev = vec![usize::MAX; n];
    let mut heap = BinaryHeap::new();
    dist[s] = 0;
    heap.push(Reverse((0u64, s)));
    while let Some(Reverse((d, u))) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        if u == t {
            break;
        }
        for &(v, w) in &adj[u] {
            let nd = d + w;
            if nd < dist[v] {
                dist[v] = nd;
                prev[v] = u;
                heap.push(Reverse((nd, v)));
            }
        }
    }
    if dist[t] == u64::MAX {
        return None;
    }
    let mut path = vec![t];
    while *path.last().unwrap() != s {
        path.push(prev[*path.last().unwrap()]);
    }
    path.reverse();
    Some((dist[t], path))
}

/// Total weight of `path` if every hop is an edge of `g`.
pub fn path_weight(g: &Graph, path: &[usize]) -> Option<u64> {
    path.windows(2)
        .map(|hop| g.find_edge(hop[0], hop[1]).map(|e| e.cost()))
        .sum()
}

/// Accepts any `s`→`t` path whose total weight equals the optimum.
pub fn check_shortest_path_answer(g: &Graph, s: usize, t: usize, path: &[usize]) -> bool {
    if path.first() != Some(&s) || path.last() != Some(&t) {
        return false;
    }
    if path.iter().any(|&v| v >= g.node_count()) {
        return false;
    }
    match (path_weight(g, path), solve_shortest_path(g, s, t)) {
        (Some(w), Some((best, _))) => w == best,
        _ => false,
    }
}

struct FlowArc {
    to: usize,
    rev: usize,
    residual: u64,
}

/// Edmonds–Karp maximum flow. Undirected edges carry capacity both ways.
pub fn solve_max_flow(g: &Graph, s: usize, t: usize) -> u64 {
    let n = g.node_count();
    if s == t || s >= n || t >= n {
        return 0;
    }
    let mut arcs: Vec<Vec<FlowArc>> = (0..n).map(|_| Vec::new()).collect();
    let add = |arcs: &mut Vec<Vec<FlowArc>>, u: usize, v: usize, cap: u64| {
        let (ru, rv) = (arcs[v].len(), arcs[u].len());
        arcs[u].push(FlowArc { to: v, rev: ru, residual: cap });
        arcs[v].push(FlowArc { to: u, rev: rv, residual: 0 });
    };
    for e in g.edges() {
        add(&mut arcs, e.u, e.v, e.cost());
        if !g.is_directed() {
            add(&mut arcs, e.v, e.u, e.cost());
        }
    }

    let mut total = 0;
    loop {
        let mut via: Vec<Option<(usize, usize)>> = vec![None; n];
        let mut queue = VecDeque::from([s]);
        let mut reached = false;
        while let Some(u) = queue.pop_front() {
            for (i, arc) in arcs[u].iter().enumerate() {
                if arc.residual > 0 && arc.to != s && via[arc.to].is_none() {
                    via[arc.to] = Some((u, i));
                    if arc.to == t {
                        reached = true;
                        break;
                    }
                    queue.push_back(arc.to);
                }
            }
            if reached {
                break;
            }
        }
        if !reached {
            return total;
        }
        let mut bottleneck = u64::MAX;
        let mut v = t;
        while let Some((u, i)) = via[v] {
            bottleneck = bottleneck.min(arcs[u][i].residual);
            v = u;
        }
        let mut v = t;
        while let Some((u, i)) = via[v] {
            arcs[u][i].residual -= bottleneck;
            let rev = arcs[u][i].rev;
            arcs[v][rev].residual += bottleneck;
            v = u;
        }
        total += bottleneck;
    }
}

/// Hopcroft–Karp maximum matching between hosts and tasks. `None` if the
/// graph carries no bipartite split.
pub fn solve_bgm(g: &Graph) -> Option<usize> {
    let (hosts, tasks) = g.bipartite_split()?;
    let mut adj = vec![Vec::new(); hosts];
    for e in g.edges() {
        let (h, t) = if e.u < hosts { (e.u, e.v) } else { (e.v, e.u) };
        adj[h].push(t - hosts);
    }
    const FREE: usize = usize::MAX;
    let mut match_host = vec![FREE; hosts];
    let mut match_task = vec![FREE; tasks];
    let mut layer = vec![0usize; hosts];
    let mut matched = 0;

    loop {
        // BFS layering from free hosts.
        let mut queue = VecDeque::new();
        for h in 0..hosts {
            if match_host[h] == FREE {
                layer[h] = 0;
                queue.push_back(h);
            } else {
                layer[h] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(h) = queue.pop_front() {
            for &t in &adj[h] {
                let owner = match_task[t];
                if owner == FREE {
                    found = true;
                } else if layer[owner] == usize::MAX {
                    layer[owner] = layer[h] + 1;
                    queue.push_back(owner);
                }
            }
        }
        if !found {
            return Some(matched);
        }

        fn augment(
            h: usize,
            adj: &[Vec<usize>],
            layer: &mut [usize],
            match_host: &mut [usize],
            match_task: &mut [usize],
        ) -> bool {
            for i in 0..adj[h].len() {
                let t = adj[h][i];
                let owner = match_task[t];
                if owner == usize::MAX
                    || (layer[owner] == layer[h] + 1
                        && augment(owner, adj, layer, match_host, match_task))
                {
                    match_host[h] = t;
                    match_task[t] = h;
                    return true;
                }
            }
            layer[h] = usize::MAX;
            false
        }

        for h in 0..hosts {
            if match_host[h] == FREE
                && augment(h, &adj, &mut layer, &mut match_host, &mut match_task)
            {
                matched += 1;
            }
        }
    }
}

/// True iff `path` starts at node 0, visits every node once and each
/// consecutive pair is an edge.
pub fn check_hamilton_path(g: &Graph, path: &[usize]) -> bool {
    let n = g.node_count();
    if path.len() != n || path.first() != Some(&0) {
        return false;
    }
    let mut seen = vec![false; n];
    for &v in path {
        if v >= n || seen[v] {
            return false;
        }
        seen[v] = true;
    }
    path.windows(2).all(|hop| g.has_edge(hop[0], hop[1]))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HamiltonSearch {
    Found(Vec<usize>),
    NotFound,
    /// The expansion budget ran out before the search finished.
    Exhausted,
}

/// Exact Hamilton path search from node 0.
pub fn solve_hamilton_path(g: &Graph) -> Option<Vec<usize>> {
    match search_hamilton_path(g, u64::MAX) {
        HamiltonSearch::Found(p) => Some(p),
        _ => None,
    }
}

/// Backtracking from node 0 with reachability and dead-end pruning;
/// neighbors are tried fewest-onward-moves first.
pub fn search_hamilton_path(g: &Graph, max_expansions: u64) -> HamiltonSearch {
    let n = g.node_count();
    let adj = g.adjacency();
    let mut state = HamiltonState {
        adj: &adj,
        visited: vec![false; n],
        path: Vec::with_capacity(n),
        budget: max_expansions,
    };
    state.visited[0] = true;
    state.path.push(0);
    match state.extend() {
        Some(true) => HamiltonSearch::Found(state.path),
        Some(false) => HamiltonSearch::NotFound,
        None => HamiltonSearch::Exhausted,
    }
}

struct HamiltonState<'a> {
    adj: &'a [Vec<(usize, u64)>],
    visited: Vec<bool>,
    path: Vec<usize>,
    budget: u64,
}

impl HamiltonState<'_> {
    /// `None` when the budget is exhausted.
    fn extend(&mut self) -> Option<bool> {
        let n = self.visited.len();
        if self.path.len() == n {
            return Some(true);
        }
        if self.budget == 0 {
            return None;
        }
        self.budget -= 1;
        let current = *self.path.last().unwrap();
        if !self.remaining_is_feasible(current) {
            return Some(false);
        }
        let mut candidates: Vec<(usize, usize)> = self.adj[current]
            .iter()
            .filter(|(v, _)| !self.visited[*v])
            .map(|&(v, _)| (self.onward_degree(v), v))
            .collect();
        candidates.sort_unstable();
        for (_, v) in candidates {
            self.visited[v] = true;
            self.path.push(v);
            match self.extend() {
                Some(true) => return Some(true),
                None => return None,
                Some(false) => {}
            }
            self.path.pop();
            self.visited[v] = false;
        }
        Some(false)
    }

    fn onward_degree(&self, v: usize) -> usize {
        self.adj[v].iter().filter(|(w, _)| !self.visited[*w]).count()
    }

    /// Every unvisited node must be reachable from `current` through
    /// unvisited nodes, and at most one unvisited node may be a forced end.
    fn remaining_is_feasible(&self, current: usize) -> bool {
        let n = self.visited.len();
        let remaining = n - self.path.len();
        let mut reached = vec![false; n];
        let mut stack = vec![current];
        let mut count = 0;
        reached[current] = true;
        while let Some(u) = stack.pop() {
            for &(v, _) in &self.adj[u] {
                if !self.visited[v] && !reached[v] {
                    reached[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        if count < remaining {
            return false;
        }
        let mut dead_ends = 0;
        for v in 0..n {
            if self.visited[v] {
                continue;
            }
            let links = self.adj[v]
                .iter()
                .filter(|(w, _)| !self.visited[*w] || *w == current)
                .count();
            if links <= 1 && remaining > 1 {
                dead_ends += 1;
                if dead_ends > 1 {
                    return false;
                }
            }
        }
        true
    }
}
