use std::collections::{BTreeMap, BTreeSet};

use super::{Edge, Graph, GraphError};

/// A graph read from a whitespace edge list, with the original node labels.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeListGraph {
    pub graph: Graph,
    /// `labels[i]` is the original token of dense node `i`.
    pub labels: Vec<String>,
}

impl EdgeListGraph {
    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

/// Parses `u v [w]` lines. `#` starts a comment; blank lines are skipped.
///
/// Node labels are remapped to `0..N` in ascending order (numerically when
/// every label is an integer). Self-loops and repeated edges, common in
/// real-world dumps, are dropped. Weights are kept only if every edge has one.
pub fn parse_edge_list(text: &str, directed: bool) -> Result<EdgeListGraph, GraphError> {
    let mut raw: Vec<(String, String, Option<u32>)> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let weight = match fields.len() {
            2 => None,
            3 => Some(fields[2].parse::<u32>().map_err(|_| GraphError::EdgeList {
                line: idx + 1,
                message: format!("bad weight {:?}", fields[2]),
            })?),
            n => {
                return Err(GraphError::EdgeList {
                    line: idx + 1,
                    message: format!("expected 2 or 3 fields, found {n}"),
                })
            }
        };
        raw.push((fields[0].to_string(), fields[1].to_string(), weight));
    }

    let names: BTreeSet<&str> = raw
        .iter()
        .flat_map(|(u, v, _)| [u.as_str(), v.as_str()])
        .collect();
    if names.is_empty() {
        return Err(GraphError::Empty);
    }
    let mut labels: Vec<String> = names.iter().map(|s| s.to_string()).collect();
    if labels.iter().all(|l| l.parse::<u64>().is_ok()) {
        labels.sort_by_key(|l| l.parse::<u64>().unwrap());
    }
    let index: BTreeMap<&str, usize> = labels
        .iter()
        .enumerate()
        .map(|(i, l)| (l.as_str(), i))
        .collect();

    let weighted = raw.iter().all(|(_, _, w)| w.is_some());
    let mut seen = BTreeSet::new();
    let mut edges = Vec::new();
    for (u, v, w) in &raw {
        let (mut a, mut b) = (index[u.as_str()], index[v.as_str()]);
        if a == b {
            continue;
        }
        if !directed && a > b {
            std::mem::swap(&mut a, &mut b);
        }
        if seen.insert((a, b)) {
            let weight = if weighted { w.filter(|&w| w > 0).or(Some(1)) } else { None };
            edges.push(Edge { u: a, v: b, weight });
        }
    }
    let graph = Graph::new(labels.len(), directed, edges, None)?;
    Ok(EdgeListGraph { graph, labels })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn remaps_sparse_ids() {
        let parsed = parse_edge_list("# comment\n10 20\n20 30 # tail\n\n30 10\n", false).unwrap();
        assert_eq!(parsed.labels, vec!["10", "20", "30"]);
        assert_eq!(parsed.graph.edge_count(), 3);
        assert!(parsed.graph.has_edge(0, 2));
        assert_eq!(parsed.index_of("30"), Some(2));
    }

    #[test]
    fn drops_loops_and_duplicates() {
        let parsed = parse_edge_list("1 1\n1 2\n2 1\n", false).unwrap();
        assert_eq!(parsed.graph.edge_count(), 1);
        let directed = parse_edge_list("1 2\n2 1\n", true).unwrap();
        assert_eq!(directed.graph.edge_count(), 2);
    }

    #[test]
    fn numeric_order_not_lexicographic() {
        let parsed = parse_edge_list("9 10\n", false).unwrap();
        assert_eq!(parsed.labels, vec!["9", "10"]);
    }

    #[test]
    fn weights_and_errors() {
        let parsed = parse_edge_list("a b 3\nb c 4\n", false).unwrap();
        assert!(parsed.graph.is_weighted());
        assert!(matches!(
            parse_edge_list("a b c d\n", false),
            Err(GraphError::EdgeList { line: 1, .. })
        ));
        assert_eq!(parse_edge_list("# nothing\n", false), Err(GraphError::Empty));
    }
}
