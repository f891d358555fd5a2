//! Graph data model shared by every representation and oracle.

mod generate;
mod ingest;
mod khop;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use generate::{generate_bipartite_graph, generate_er_graph, ErConfig};
pub use ingest::{parse_edge_list, EdgeListGraph};
pub use khop::{extract_khop_subgraph, KhopSubgraph};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph must have at least one node")]
    Empty,
    #[error("edge ({0}, {1}) references a node outside 0..{2}")]
    NodeOutOfRange(usize, usize, usize),
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("edge weights must be present on every edge or on none")]
    MixedWeights,
    #[error("edge weight must be positive")]
    ZeroWeight,
    #[error("bipartite split {0}+{1} does not match node count {2}")]
    BadSplit(usize, usize, usize),
    #[error("edge ({0}, {1}) does not cross the bipartite partition")]
    SameSide(usize, usize),
    #[error("node {0} is out of range")]
    BadNode(usize),
    #[error("edge list line {line}: {message}")]
    EdgeList { line: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: Option<u32>,
}

impl Edge {
    pub fn new(u: usize, v: usize) -> Self {
        Edge { u, v, weight: None }
    }

    pub fn weighted(u: usize, v: usize, weight: u32) -> Self {
        Edge {
            u,
            v,
            weight: Some(weight),
        }
    }

    /// Weight used by path and flow solvers; unweighted edges count as 1.
    pub fn cost(&self) -> u64 {
        u64::from(self.weight.unwrap_or(1))
    }
}

/// An immutable, validated topology.
///
/// Undirected edges are stored with `u < v`; all edges are kept sorted by
/// `(u, v)`, which makes structural equality canonical.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphJson", into = "GraphJson")]
pub struct Graph {
    node_count: usize,
    directed: bool,
    edges: Vec<Edge>,
    bipartite: Option<(usize, usize)>,
}

impl Graph {
    pub fn new(
        node_count: usize,
        directed: bool,
        edges: Vec<Edge>,
        bipartite: Option<(usize, usize)>,
    ) -> Result<Self, GraphError> {
        if node_count == 0 {
            return Err(GraphError::Empty);
        }
        let mut edges: Vec<Edge> = edges
            .into_iter()
            .map(|e| {
                if !directed && e.u > e.v {
                    Edge { u: e.v, v: e.u, ..e }
                } else {
                    e
                }
            })
            .collect();
        for e in &edges {
            if e.u >= node_count || e.v >= node_count {
                return Err(GraphError::NodeOutOfRange(e.u, e.v, node_count));
            }
            if e.u == e.v {
                return Err(GraphError::SelfLoop(e.u));
            }
            if e.weight == Some(0) {
                return Err(GraphError::ZeroWeight);
            }
        }
        if let Some(first) = edges.first() {
            let weighted = first.weight.is_some();
            if edges.iter().any(|e| e.weight.is_some() != weighted) {
                return Err(GraphError::MixedWeights);
            }
        }
        edges.sort();
        for pair in edges.windows(2) {
            if pair[0].u == pair[1].u && pair[0].v == pair[1].v {
                return Err(GraphError::DuplicateEdge(pair[0].u, pair[0].v));
            }
        }
        if let Some((hosts, tasks)) = bipartite {
            if hosts + tasks != node_count {
                return Err(GraphError::BadSplit(hosts, tasks, node_count));
            }
            for e in &edges {
                if (e.u < hosts) == (e.v < hosts) {
                    return Err(GraphError::SameSide(e.u, e.v));
                }
            }
        }
        Ok(Graph {
            node_count,
            directed,
            edges,
            bipartite,
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn bipartite_split(&self) -> Option<(usize, usize)> {
        self.bipartite
    }

    pub fn is_weighted(&self) -> bool {
        self.edges.first().is_some_and(|e| e.weight.is_some())
    }

    pub fn contains_node(&self, node: usize) -> bool {
        node < self.node_count
    }

    /// Edge lookup honoring direction; undirected lookups are symmetric.
    pub fn find_edge(&self, u: usize, v: usize) -> Option<&Edge> {
        let key = if self.directed || u < v { (u, v) } else { (v, u) };
        self.edges
            .binary_search_by(|e| (e.u, e.v).cmp(&key))
            .ok()
            .map(|i| &self.edges[i])
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.find_edge(u, v).is_some()
    }

    /// Outgoing adjacency (both directions for undirected graphs), each list
    /// sorted ascending. Entries are `(neighbor, weight-or-1)`.
    pub fn adjacency(&self) -> Vec<Vec<(usize, u64)>> {
        let mut adj = vec![Vec::new(); self.node_count];
        for e in &self.edges {
            adj[e.u].push((e.v, e.cost()));
            if !self.directed {
                adj[e.v].push((e.u, e.cost()));
            }
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    /// Adjacency ignoring direction, sorted ascending.
    pub fn undirected_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.node_count];
        for e in &self.edges {
            adj[e.u].push(e.v);
            adj[e.v].push(e.u);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }

    /// Edge density: `2|E| / (N(N-1))` undirected, `|E| / (N(N-1))` directed.
    pub fn density(&self) -> f64 {
        let n = self.node_count as f64;
        if self.node_count < 2 {
            return 0.0;
        }
        let pairs = n * (n - 1.0);
        let e = self.edges.len() as f64;
        if self.directed {
            e / pairs
        } else {
            2.0 * e / pairs
        }
    }
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    directed: bool,
    edges: Vec<Vec<u64>>,
    #[serde(default)]
    bipartite: Option<[usize; 2]>,
}

impl TryFrom<GraphJson> for Graph {
    type Error = String;

    fn try_from(raw: GraphJson) -> Result<Self, Self::Error> {
        let edges = raw
            .edges
            .iter()
            .map(|e| match e.as_slice() {
                [u, v] => Ok(Edge::new(*u as usize, *v as usize)),
                [u, v, w] => {
                    let w = u32::try_from(*w).map_err(|_| format!("weight {w} too large"))?;
                    Ok(Edge::weighted(*u as usize, *v as usize, w))
                }
                other => Err(format!("edge must have 2 or 3 entries, got {}", other.len())),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Graph::new(
            raw.n,
            raw.directed,
            edges,
            raw.bipartite.map(|[h, t]| (h, t)),
        )
        .map_err(|e| e.to_string())
    }
}

impl From<Graph> for GraphJson {
    fn from(g: Graph) -> Self {
        GraphJson {
            n: g.node_count,
            directed: g.directed,
            edges: g
                .edges
                .iter()
                .map(|e| match e.weight {
                    Some(w) => vec![e.u as u64, e.v as u64, u64::from(w)],
                    None => vec![e.u as u64, e.v as u64],
                })
                .collect(),
            bipartite: g.bipartite.map(|(h, t)| [h, t]),
        }
    }
}
