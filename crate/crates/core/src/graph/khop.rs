use std::collections::BTreeMap;

use super::{Edge, Graph, GraphError};

#[derive(Debug, Clone, PartialEq)]
pub struct KhopSubgraph {
    pub graph: Graph,
    /// `new_to_old[i]` is the original id of relabeled node `i`.
    pub new_to_old: Vec<usize>,
    pub old_to_new: BTreeMap<usize, usize>,
}

/// Induced subgraph on the radius-`k` ball around `center`.
///
/// Nodes are admitted hop by hop, ascending id within a hop, until
/// `max_nodes` are taken. Direction is ignored when growing the ball; the
/// induced edges keep their orientation and weights. The center becomes
/// node 0.
pub fn extract_khop_subgraph(
    g: &Graph,
    center: usize,
    k: usize,
    max_nodes: usize,
) -> Result<KhopSubgraph, GraphError> {
    if !g.contains_node(center) {
        return Err(GraphError::BadNode(center));
    }
    let max_nodes = max_nodes.max(1);
    let adj = g.undirected_adjacency();
    let mut seen = vec![false; g.node_count()];
    seen[center] = true;
    let mut order = vec![center];
    let mut frontier = vec![center];
    'grow: for _ in 0..k {
        let mut next: Vec<usize> = frontier
            .iter()
            .flat_map(|&u| adj[u].iter().copied())
            .filter(|&v| !seen[v])
            .collect();
        next.sort_unstable();
        next.dedup();
        if next.is_empty() {
            break;
        }
        for &v in &next {
            if order.len() == max_nodes {
                break 'grow;
            }
            seen[v] = true;
            order.push(v);
        }
        frontier = next;
    }

    let old_to_new: BTreeMap<usize, usize> =
        order.iter().enumerate().map(|(new, &old)| (old, new)).collect();
    let edges = g
        .edges()
        .iter()
        .filter_map(|e| {
            let u = *old_to_new.get(&e.u)?;
            let v = *old_to_new.get(&e.v)?;
            Some(Edge { u, v, weight: e.weight })
        })
        .collect();
    let graph = Graph::new(order.len(), g.is_directed(), edges, None)?;
    Ok(KhopSubgraph {
        graph,
        new_to_old: order,
        old_to_new,
    })
}
