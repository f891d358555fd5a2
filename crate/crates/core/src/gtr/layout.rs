//! Native implementations of the five layout engines.
//!
//! Coordinates are abstract canvas units with the origin at the top left.
//! Every layout keeps node centers at least two node radii apart.

use std::collections::VecDeque;
use std::f64::consts::PI;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::graph::Graph;
use crate::rng::{rng_from_seed, Rng};

pub const NODE_RADIUS: f64 = 12.0;
/// Distance from the canvas border to the nearest node center.
pub const MARGIN: f64 = NODE_RADIUS + 8.0;

const LAYER_GAP: f64 = 60.0;
const RANK_SPACING: f64 = 2.0 * NODE_RADIUS + 16.0;
const NEATO_ITERATIONS: usize = 500;
const FDP_ITERATIONS: usize = 200;
const SFDP_REFINE_ITERATIONS: usize = 50;
const SFDP_COARSEST: usize = 16;
const BARYCENTER_SWEEPS: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layout {
    pub positions: Vec<(f64, f64)>,
    pub width: f64,
    pub height: f64,
}

impl Layout {
    pub fn min_pairwise_distance(&self) -> f64 {
        min_distance(&self.positions)
    }
}

/// Square canvas side before any overlap scaling: `100 + 30·sqrt(N)`.
pub fn base_canvas(n: usize) -> f64 {
    100.0 + 30.0 * (n as f64).sqrt()
}

fn distance(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

fn min_distance(points: &[(f64, f64)]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            best = best.min(distance(points[i], points[j]));
        }
    }
    best
}

/// Scales about the centroid until node centers are `2·NODE_RADIUS` apart,
/// then centers the drawing on a canvas that is at least the base size.
fn finalize(mut points: Vec<(f64, f64)>) -> Layout {
    let n = points.len();
    let base = base_canvas(n);
    if n == 1 {
        return Layout { positions: vec![(base / 2.0, base / 2.0)], width: base, height: base };
    }
    // Separate exact coincidences deterministically before scaling.
    let mut fixed = false;
    while !fixed {
        fixed = true;
        for i in 0..n {
            for j in i + 1..n {
                if distance(points[i], points[j]) < 1e-6 {
                    let angle = (j as f64) * 2.399_963;
                    points[j].0 += angle.cos() * 1e-3;
                    points[j].1 += angle.sin() * 1e-3;
                    fixed = false;
                }
            }
        }
    }
    let d = min_distance(&points);
    let needed = 2.0 * NODE_RADIUS;
    if d < needed {
        let factor = needed / d * (1.0 + 1e-9);
        let (cx, cy) = centroid(&points);
        for p in &mut points {
            p.0 = cx + (p.0 - cx) * factor;
            p.1 = cy + (p.1 - cy) * factor;
        }
    }
    let (min_x, max_x, min_y, max_y) = bounds(&points);
    let width = base.max(max_x - min_x + 2.0 * MARGIN);
    let height = base.max(max_y - min_y + 2.0 * MARGIN);
    let dx = (width - (max_x - min_x)) / 2.0 - min_x;
    let dy = (height - (max_y - min_y)) / 2.0 - min_y;
    Layout {
        positions: points.into_iter().map(|(x, y)| (x + dx, y + dy)).collect(),
        width,
        height,
    }
}

fn centroid(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let (sx, sy) = points.iter().fold((0.0, 0.0), |acc, p| (acc.0 + p.0, acc.1 + p.1));
    (sx / n, sy / n)
}

fn bounds(points: &[(f64, f64)]) -> (f64, f64, f64, f64) {
    points.iter().fold(
        (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
        |(a, b, c, d), p| (a.min(p.0), b.max(p.0), c.min(p.1), d.max(p.1)),
    )
}

// ---------------------------------------------------------------------------
// Circular

/// Nodes on a circle at angle `2πi/N`, in id order. The radius is the
/// larger of the canvas radius and the one that makes adjacent chords
/// `2·NODE_RADIUS` long.
pub fn layout_circo(g: &Graph) -> Layout {
    let n = g.node_count();
    let (side, radius) = circo_geometry(n);
    let c = side / 2.0;
    let positions = (0..n)
        .map(|i| {
            if n == 1 {
                return (c, c);
            }
            let angle = 2.0 * PI * i as f64 / n as f64;
            (c + radius * angle.cos(), c + radius * angle.sin())
        })
        .collect();
    Layout { positions, width: side, height: side }
}

/// `(canvas side, circle radius)` for `n` nodes.
pub fn circo_geometry(n: usize) -> (f64, f64) {
    let base = base_canvas(n);
    if n <= 1 {
        return (base, 0.0);
    }
    let chord_radius = NODE_RADIUS / (PI / n as f64).sin();
    let radius = (base / 2.0 - MARGIN).max(chord_radius);
    (base.max(2.0 * (radius + MARGIN)), radius)
}

// ---------------------------------------------------------------------------
// Hierarchical

/// Orients every edge so that the result is acyclic: directed graphs drop
/// DFS back edges by reversing them, undirected graphs point from earlier
/// to later BFS visit order (BFS from node 0, then from the lowest
/// unvisited node).
fn acyclic_orientation(g: &Graph) -> Vec<(usize, usize)> {
    let n = g.node_count();
    if g.is_directed() {
        let adj = g.adjacency();
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut state = vec![0u8; n];
        let mut arcs = Vec::with_capacity(g.edge_count());
        for root in 0..n {
            if state[root] != 0 {
                continue;
            }
            let mut stack = vec![(root, 0usize)];
            state[root] = 1;
            while let Some(&mut (u, ref mut next)) = stack.last_mut() {
                if *next < adj[u].len() {
                    let v = adj[u][*next].0;
                    *next += 1;
                    match state[v] {
                        0 => {
                            arcs.push((u, v));
                            state[v] = 1;
                            stack.push((v, 0));
                        }
                        1 => arcs.push((v, u)),
                        _ => arcs.push((u, v)),
                    }
                } else {
                    state[u] = 2;
                    stack.pop();
                }
            }
        }
        arcs
    } else {
        let adj = g.undirected_adjacency();
        let mut order = vec![usize::MAX; n];
        let mut counter = 0;
        for root in 0..n {
            if order[root] != usize::MAX {
                continue;
            }
            order[root] = counter;
            counter += 1;
            let mut queue = VecDeque::from([root]);
            while let Some(u) = queue.pop_front() {
                for &v in &adj[u] {
                    if order[v] == usize::MAX {
                        order[v] = counter;
                        counter += 1;
                        queue.push_back(v);
                    }
                }
            }
        }
        g.edges()
            .iter()
            .map(|e| if order[e.u] < order[e.v] { (e.u, e.v) } else { (e.v, e.u) })
            .collect()
    }
}

/// Longest-path layer of every node over acyclic `arcs`.
fn longest_path_layers(n: usize, arcs: &[(usize, usize)]) -> Vec<usize> {
    let mut indegree = vec![0usize; n];
    let mut out = vec![Vec::new(); n];
    for &(u, v) in arcs {
        indegree[v] += 1;
        out[u].push(v);
    }
    let mut layer = vec![0usize; n];
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| indegree[v] == 0).collect();
    while let Some(u) = queue.pop_front() {
        for &v in &out[u] {
            layer[v] = layer[v].max(layer[u] + 1);
            indegree[v] -= 1;
            if indegree[v] == 0 {
                queue.push_back(v);
            }
        }
    }
    layer
}

/// Layer assignment and in-layer order used by [`layout_dot`].
pub fn dot_ranks(g: &Graph) -> (Vec<usize>, Vec<Vec<usize>>) {
    let n = g.node_count();
    let arcs = acyclic_orientation(g);
    let layer = longest_path_layers(n, &arcs);
    let depth = layer.iter().copied().max().unwrap_or(0) + 1;
    let mut rows: Vec<Vec<usize>> = vec![Vec::new(); depth];
    for v in 0..n {
        rows[layer[v]].push(v);
    }
    let mut up = vec![Vec::new(); n];
    let mut down = vec![Vec::new(); n];
    for &(u, v) in &arcs {
        down[u].push(v);
        up[v].push(u);
    }
    let mut slot = vec![0.0f64; n];
    let place = |rows: &Vec<Vec<usize>>, slot: &mut Vec<f64>| {
        for row in rows {
            let mid = (row.len() as f64 - 1.0) / 2.0;
            for (i, &v) in row.iter().enumerate() {
                slot[v] = i as f64 - mid;
            }
        }
    };
    place(&rows, &mut slot);
    for sweep in 0..BARYCENTER_SWEEPS {
        let downward = sweep % 2 == 0;
        let order: Vec<usize> = if downward { (1..depth).collect() } else { (0..depth.saturating_sub(1)).rev().collect() };
        for l in order {
            let neighbors = if downward { &up } else { &down };
            let mut keyed: Vec<(f64, usize)> = rows[l]
                .iter()
                .map(|&v| {
                    let ns = &neighbors[v];
                    let key = if ns.is_empty() {
                        slot[v]
                    } else {
                        ns.iter().map(|&u| slot[u]).sum::<f64>() / ns.len() as f64
                    };
                    (key, v)
                })
                .collect();
            keyed.sort_by(|a, b| a.0.total_cmp(&b.0));
            rows[l] = keyed.into_iter().map(|(_, v)| v).collect();
            let mid = (rows[l].len() as f64 - 1.0) / 2.0;
            for (i, &v) in rows[l].iter().enumerate() {
                slot[v] = i as f64 - mid;
            }
        }
    }
    (layer, rows)
}

/// Hierarchical layout: longest-path layering, barycenter ordering, even
/// spacing within each layer.
pub fn layout_dot(g: &Graph, _seed: u64) -> Layout {
    let n = g.node_count();
    let (_, rows) = dot_ranks(g);
    let widest = rows.iter().map(Vec::len).max().unwrap_or(1) as f64;
    let base = base_canvas(n);
    let width = base.max((widest - 1.0) * RANK_SPACING + 2.0 * MARGIN);
    let span = (rows.len() as f64 - 1.0) * LAYER_GAP;
    let height = base.max(span + 2.0 * MARGIN);
    let top = (height - span) / 2.0;
    let mut positions = vec![(0.0, 0.0); n];
    for (l, row) in rows.iter().enumerate() {
        let mid = (row.len() as f64 - 1.0) / 2.0;
        for (i, &v) in row.iter().enumerate() {
            positions[v] = (width / 2.0 + (i as f64 - mid) * RANK_SPACING, top + l as f64 * LAYER_GAP);
        }
    }
    Layout { positions, width, height }
}

// ---------------------------------------------------------------------------
// Force-directed

struct ForceGraph {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
}

impl ForceGraph {
    fn from_graph(g: &Graph) -> Self {
        ForceGraph {
            n: g.node_count(),
            edges: g.edges().iter().map(|e| (e.u, e.v, 1.0)).collect(),
        }
    }
}

struct ForceParams {
    iterations: usize,
    start_temperature: f64,
    /// Ideal edge length.
    k: f64,
    side: f64,
    /// Restrict repulsion to neighboring grid cells of size `2k`.
    grid: bool,
}

fn repulse(delta: (f64, f64), d: f64, k: f64, i: usize, j: usize) -> (f64, f64) {
    if d < 1e-9 {
        // Coincident nodes: push apart along an index-dependent direction.
        let angle = (i * 31 + j * 17) as f64;
        return (angle.cos() * k, angle.sin() * k);
    }
    let f = k * k / d;
    (delta.0 / d * f, delta.1 / d * f)
}

/// Fruchterman–Reingold iterations with a linearly cooled temperature.
fn fruchterman_reingold(graph: &ForceGraph, pos: &mut [(f64, f64)], params: &ForceParams) {
    let n = graph.n;
    if n < 2 {
        return;
    }
    let k = params.k;
    let mut disp = vec![(0.0f64, 0.0f64); n];
    let cell = 2.0 * k;
    let cells_per_side = ((params.side / cell).ceil() as usize).max(1) + 1;
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); if params.grid { cells_per_side * cells_per_side } else { 0 }];

    for iter in 0..params.iterations {
        let temperature = params.start_temperature * (1.0 - iter as f64 / params.iterations as f64);
        disp.iter_mut().for_each(|d| *d = (0.0, 0.0));

        if params.grid {
            for b in &mut buckets {
                b.clear();
            }
            let cell_of = |p: (f64, f64)| {
                let cx = ((p.0 / cell).floor().max(0.0) as usize).min(cells_per_side - 1);
                let cy = ((p.1 / cell).floor().max(0.0) as usize).min(cells_per_side - 1);
                (cx, cy)
            };
            for (i, &p) in pos.iter().enumerate() {
                let (cx, cy) = cell_of(p);
                buckets[cy * cells_per_side + cx].push(i);
            }
            for i in 0..n {
                let (cx, cy) = cell_of(pos[i]);
                for ny in cy.saturating_sub(1)..=(cy + 1).min(cells_per_side - 1) {
                    for nx in cx.saturating_sub(1)..=(cx + 1).min(cells_per_side - 1) {
                        for &j in &buckets[ny * cells_per_side + nx] {
                            if j == i {
                                continue;
                            }
                            let delta = (pos[i].0 - pos[j].0, pos[i].1 - pos[j].1);
                            let d = delta.0.hypot(delta.1);
                            if d > cell {
                                continue;
                            }
                            let f = repulse(delta, d, k, i.min(j), i.max(j));
                            let sign = if i < j { 1.0 } else { -1.0 };
                            let f = if d < 1e-9 { (f.0 * sign, f.1 * sign) } else { f };
                            disp[i].0 += f.0;
                            disp[i].1 += f.1;
                        }
                    }
                }
            }
        } else {
            for i in 0..n {
                for j in i + 1..n {
                    let delta = (pos[i].0 - pos[j].0, pos[i].1 - pos[j].1);
                    let d = delta.0.hypot(delta.1);
                    let f = repulse(delta, d, k, i, j);
                    disp[i].0 += f.0;
                    disp[i].1 += f.1;
                    disp[j].0 -= f.0;
                    disp[j].1 -= f.1;
                }
            }
        }

        for &(u, v, w) in &graph.edges {
            let delta = (pos[u].0 - pos[v].0, pos[u].1 - pos[v].1);
            let d = delta.0.hypot(delta.1);
            if d < 1e-9 {
                continue;
            }
            let f = w * d * d / k;
            let (fx, fy) = (delta.0 / d * f, delta.1 / d * f);
            disp[u].0 -= fx;
            disp[u].1 -= fy;
            disp[v].0 += fx;
            disp[v].1 += fy;
        }

        for (p, d) in pos.iter_mut().zip(&disp) {
            let len = d.0.hypot(d.1);
            if len > 0.0 {
                let step = len.min(temperature);
                p.0 += d.0 / len * step;
                p.1 += d.1 / len * step;
            }
            p.0 = p.0.clamp(0.0, params.side);
            p.1 = p.1.clamp(0.0, params.side);
        }
    }
}

fn frame_side(n: usize) -> f64 {
    base_canvas(n) - 2.0 * MARGIN
}

fn ideal_length(side: f64, n: usize) -> f64 {
    (side * side / n.max(1) as f64).sqrt()
}

fn random_positions(n: usize, side: f64, rng: &mut Rng) -> Vec<(f64, f64)> {
    (0..n).map(|_| (rng.gen_range(0.0..side), rng.gen_range(0.0..side))).collect()
}

/// Spring-model layout from explicit starting positions (frame coordinates
/// in `[0, side]²` with `side = base_canvas(N) - 2·MARGIN`).
pub fn layout_neato_from(g: &Graph, initial: Vec<(f64, f64)>) -> Layout {
    let n = g.node_count();
    assert_eq!(initial.len(), n, "one starting position per node");
    let side = frame_side(n);
    let mut pos = initial;
    let params = ForceParams {
        iterations: NEATO_ITERATIONS,
        start_temperature: 0.1 * base_canvas(n),
        k: ideal_length(side, n),
        side,
        grid: false,
    };
    fruchterman_reingold(&ForceGraph::from_graph(g), &mut pos, &params);
    finalize(pos)
}

/// Spring-model layout (Fruchterman–Reingold, all-pairs repulsion).
pub fn layout_neato(g: &Graph, seed: u64) -> Layout {
    let n = g.node_count();
    let mut rng = rng_from_seed(seed);
    layout_neato_from(g, random_positions(n, frame_side(n), &mut rng))
}

/// Ideal edge length used by the spring layouts for `n` nodes.
pub fn spring_ideal_length(n: usize) -> f64 {
    ideal_length(frame_side(n), n)
}

/// Grid-bucketed force-directed layout.
pub fn layout_fdp(g: &Graph, seed: u64) -> Layout {
    let n = g.node_count();
    let side = frame_side(n);
    let mut rng = rng_from_seed(seed);
    let mut pos = random_positions(n, side, &mut rng);
    let params = ForceParams {
        iterations: FDP_ITERATIONS,
        start_temperature: 0.1 * base_canvas(n),
        k: ideal_length(side, n),
        side,
        grid: true,
    };
    fruchterman_reingold(&ForceGraph::from_graph(g), &mut pos, &params);
    finalize(pos)
}

/// One coarsening step by heavy-edge matching. Returns the coarse graph
/// and the fine→coarse node map.
fn coarsen(graph: &ForceGraph, mass: &[f64]) -> (ForceGraph, Vec<usize>, Vec<f64>) {
    let n = graph.n;
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for &(u, v, w) in &graph.edges {
        adj[u].push((v, w));
        adj[v].push((u, w));
    }
    let mut parent = vec![usize::MAX; n];
    let mut coarse_mass = Vec::new();
    for u in 0..n {
        if parent[u] != usize::MAX {
            continue;
        }
        let id = coarse_mass.len();
        parent[u] = id;
        let partner = adj[u]
            .iter()
            .filter(|(v, _)| parent[*v] == usize::MAX)
            .max_by(|a, b| {
                a.1.total_cmp(&b.1)
                    .then(mass[b.0].total_cmp(&mass[a.0]))
                    .then(b.0.cmp(&a.0))
            })
            .map(|&(v, _)| v);
        let mut m = mass[u];
        if let Some(v) = partner {
            parent[v] = id;
            m += mass[v];
        }
        coarse_mass.push(m);
    }
    let mut merged: std::collections::BTreeMap<(usize, usize), f64> = Default::default();
    for &(u, v, w) in &graph.edges {
        let (a, b) = (parent[u], parent[v]);
        if a != b {
            *merged.entry((a.min(b), a.max(b))).or_default() += w;
        }
    }
    let coarse = ForceGraph {
        n: coarse_mass.len(),
        edges: merged.into_iter().map(|((a, b), w)| (a, b, w)).collect(),
    };
    (coarse, parent, coarse_mass)
}

/// Multilevel force-directed layout: coarsen to at most 16 nodes, lay out
/// the coarsest level, then prolong with jitter and refine level by level.
pub fn layout_sfdp(g: &Graph, seed: u64) -> Layout {
    let n = g.node_count();
    let side = frame_side(n);
    let mut rng = rng_from_seed(seed);

    let mut levels = vec![ForceGraph::from_graph(g)];
    let mut maps: Vec<Vec<usize>> = Vec::new();
    let mut mass = vec![1.0; n];
    while levels.last().unwrap().n > SFDP_COARSEST {
        let current = levels.last().unwrap();
        let (coarse, map, coarse_mass) = coarsen(current, &mass);
        if coarse.n as f64 > 0.9 * current.n as f64 {
            break;
        }
        levels.push(coarse);
        maps.push(map);
        mass = coarse_mass;
    }

    let coarsest = levels.last().unwrap();
    let mut pos = random_positions(coarsest.n, side, &mut rng);
    fruchterman_reingold(
        coarsest,
        &mut pos,
        &ForceParams {
            iterations: FDP_ITERATIONS,
            start_temperature: 0.1 * base_canvas(n),
            k: ideal_length(side, coarsest.n),
            side,
            grid: true,
        },
    );

    for level in (0..levels.len() - 1).rev() {
        let fine = &levels[level];
        let map = &maps[level];
        let k = ideal_length(side, fine.n);
        let mut fine_pos: Vec<(f64, f64)> = map
            .iter()
            .map(|&c| {
                let (x, y) = pos[c];
                (
                    (x + rng.gen_range(-0.1..0.1) * k).clamp(0.0, side),
                    (y + rng.gen_range(-0.1..0.1) * k).clamp(0.0, side),
                )
            })
            .collect();
        fruchterman_reingold(
            fine,
            &mut fine_pos,
            &ForceParams {
                iterations: SFDP_REFINE_ITERATIONS,
                start_temperature: k,
                k,
                side,
                grid: true,
            },
        );
        pos = fine_pos;
    }
    finalize(pos)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_er_graph, Edge, ErConfig};

    fn directed(n: usize, edges: &[(usize, usize)]) -> Graph {
        Graph::new(n, true, edges.iter().map(|&(u, v)| Edge::new(u, v)).collect(), None).unwrap()
    }

    fn undirected(n: usize, edges: &[(usize, usize)]) -> Graph {
        Graph::new(n, false, edges.iter().map(|&(u, v)| Edge::new(u, v)).collect(), None).unwrap()
    }

    #[test]
    fn dot_chain_is_vertical() {
        let l = layout_dot(&directed(3, &[(0, 1), (1, 2)]), 0);
        let ys: Vec<f64> = l.positions.iter().map(|p| p.1).collect();
        assert!(ys[0] < ys[1] && ys[1] < ys[2]);
        assert!(l.positions.iter().all(|p| (p.0 - l.positions[0].0).abs() < 1e-9));
    }

    #[test]
    fn single_node_is_centered() {
        let g = undirected(1, &[]);
        for l in [layout_dot(&g, 0), layout_neato(&g, 0), layout_circo(&g), layout_fdp(&g, 0), layout_sfdp(&g, 0)] {
            assert_eq!(l.positions[0], (l.width / 2.0, l.height / 2.0));
        }
    }

    #[test]
    fn dot_layers_follow_dag_edges() {
        for seed in 0..30 {
            let skeleton = generate_er_graph(&ErConfig::default().with_seed(seed), false, false);
            // orient low → high id: acyclic
            let g = Graph::new(skeleton.node_count(), true, skeleton.edges().to_vec(), None).unwrap();
            let l = layout_dot(&g, 0);
            for e in g.edges() {
                assert!(l.positions[e.v].1 > l.positions[e.u].1, "seed {seed}");
            }
            assert!(l.min_pairwise_distance() >= 2.0 * NODE_RADIUS - 1e-9);
        }
    }

    #[test]
    fn dot_handles_directed_cycles() {
        let l = layout_dot(&directed(3, &[(0, 1), (1, 2), (2, 0)]), 0);
        let mut ys: Vec<f64> = l.positions.iter().map(|p| p.1).collect();
        ys.dedup();
        assert_eq!(ys.len(), 3);
    }

    #[test]
    fn circo_quarter_turns() {
        let l = layout_circo(&undirected(4, &[]));
        let c = (l.width / 2.0, l.height / 2.0);
        for i in 0..4 {
            let a = l.positions[i];
            let b = l.positions[(i + 1) % 4];
            let (va, vb) = ((a.0 - c.0, a.1 - c.1), (b.0 - c.0, b.1 - c.1));
            let dot = va.0 * vb.0 + va.1 * vb.1;
            assert!(dot.abs() < 1e-9);
        }
    }

    #[test]
    fn circo_chords_clear_nodes() {
        for n in 2..=100 {
            let l = layout_circo(&undirected(n, &[]));
            assert!(l.min_pairwise_distance() >= 2.0 * NODE_RADIUS - 1e-9, "n = {n}");
        }
    }

    #[test]
    fn neato_two_body_equilibrium() {
        let g = undirected(2, &[(0, 1)]);
        let k = spring_ideal_length(2);
        for seed in 0..10 {
            let l = layout_neato(&g, seed);
            let d = distance(l.positions[0], l.positions[1]);
            assert!((d - k).abs() <= 0.2 * k, "seed {seed}: d = {d}, k = {k}");
        }
    }

    #[test]
    fn neato_preserves_square_symmetry() {
        let g = undirected(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]);
        let side = base_canvas(4) - 2.0 * MARGIN;
        let (c, r) = (side / 2.0, side / 6.0);
        let init = vec![(c - r, c - r), (c + r, c - r), (c + r, c + r), (c - r, c + r)];
        let l = layout_neato_from(&g, init);
        let center = centroid(&l.positions);
        let radii: Vec<f64> = l.positions.iter().map(|&p| distance(p, center)).collect();
        let sides: Vec<f64> = (0..4).map(|i| distance(l.positions[i], l.positions[(i + 1) % 4])).collect();
        for i in 1..4 {
            assert!((radii[i] - radii[0]).abs() < 1e-6);
            assert!((sides[i] - sides[0]).abs() < 1e-6);
        }
    }

    #[test]
    fn force_layouts_are_deterministic_and_separated() {
        for seed in 0..10 {
            let g = generate_er_graph(&ErConfig::default().with_seed(seed), false, false);
            for f in [layout_neato, layout_fdp, layout_sfdp] {
                let a = f(&g, seed);
                assert_eq!(a, f(&g, seed));
                assert!(a.positions.iter().all(|p| p.0.is_finite() && p.1.is_finite()));
                assert!(a.min_pairwise_distance() >= 2.0 * NODE_RADIUS - 1e-9);
            }
        }
    }

    #[test]
    fn empty_graphs_do_not_overlap() {
        let g = undirected(25, &[]);
        for l in [layout_fdp(&g, 1), layout_sfdp(&g, 1)] {
            assert!(l.min_pairwise_distance() >= 2.0 * NODE_RADIUS - 1e-9);
        }
    }

    #[test]
    fn coarsening_shrinks_connected_graphs() {
        let g = undirected(8, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7)]);
        let (coarse, map, mass) = coarsen(&ForceGraph::from_graph(&g), &[1.0; 8]);
        assert_eq!(coarse.n, 4);
        assert_eq!(map.len(), 8);
        assert_eq!(mass.iter().sum::<f64>(), 8.0);
    }
}
