//! Textual GTRs: edge set, adjacency list and adjacency matrix, plus the
//! inverse parsers.
//!
//! Each task family has its own template. Bodies carry the node count in
//! their header so that isolated nodes survive a round trip.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::GtrId;
use crate::graph::{Edge, Graph};
use crate::tasks::{Question, TaskKind, TaskParams};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TextGtr {
    pub gtr: GtrId,
    pub body: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Family {
    Undirected,
    Ordering,
    Distance,
    Capacity,
    Interest,
}

fn family(task: TaskKind) -> Family {
    match task {
        TaskKind::TS => Family::Ordering,
        TaskKind::SP => Family::Distance,
        TaskKind::MF => Family::Capacity,
        TaskKind::BGM => Family::Interest,
        _ => Family::Undirected,
    }
}

const UNDIRECTED_INTRO: &str = "In an undirected graph, (i,j) means that node i and node j are \
connected with an undirected edge.";

fn last_id(n: usize) -> usize {
    n.saturating_sub(1)
}

fn numbered(n: usize) -> String {
    format!("The nodes are numbered from 0 to {}", last_id(n))
}

fn interest_header(g: &Graph) -> String {
    let (h, t) = g.bipartite_split().unwrap_or((g.node_count(), 0));
    format!(
        "There are {h} hosts numbered from 0 to {}, and {t} tasks numbered from 0 to {}. \
Each host has a set of tasks that it is interested in",
        last_id(h),
        last_id(t)
    )
}

fn ordering_header(n: usize) -> String {
    format!("In a directed graph with {n} nodes numbered from 0 to {}", last_id(n))
}

fn weighted_header(directed: bool, n: usize) -> String {
    let kind = if directed { "a directed" } else { "an undirected" };
    format!("In {kind} graph, the nodes are numbered from 0 to {}, and the edges are", last_id(n))
}

fn attributes(q: &Question) -> String {
    match &q.params {
        TaskParams::NodeClass { known, .. } if !known.is_empty() => {
            let mut out = String::from("\nThe node attributes are:");
            for (node, class) in known {
                let _ = write!(out, "\nNode {node}, Attribute {class}");
            }
            out
        }
        _ => String::new(),
    }
}

fn weight(e: &Edge) -> u64 {
    e.cost()
}

/// Edge-set representation.
pub fn serialize_tset(q: &Question) -> TextGtr {
    let g = &q.graph;
    let n = g.node_count();
    let body = match family(q.task) {
        Family::Undirected => {
            let edges: Vec<String> =
                g.edges().iter().map(|e| format!("({}, {})", e.u, e.v)).collect();
            format!(
                "{UNDIRECTED_INTRO} {}, and the edges are:\n{}{}",
                numbered(n),
                edges.join(" , "),
                attributes(q)
            )
        }
        Family::Ordering => {
            let mut out = format!("{}:", ordering_header(n));
            for e in g.edges() {
                let _ = write!(out, "\nnode {} should be visited before node {}", e.u, e.v);
            }
            out
        }
        Family::Distance | Family::Capacity => {
            let lines: Vec<String> = g
                .edges()
                .iter()
                .map(|e| {
                    if family(q.task) == Family::Distance {
                        format!("an edge between node {} and node {} with weight {}", e.u, e.v, weight(e))
                    } else {
                        format!("an edge from node {} to node {} with capacity {}", e.u, e.v, weight(e))
                    }
                })
                .collect();
            format!(
                "{}:\n{}",
                weighted_header(family(q.task) == Family::Capacity, n),
                lines.join(",\n")
            )
        }
        Family::Interest => {
            let hosts = g.bipartite_split().map_or(0, |s| s.0);
            let mut out = format!("{}:", interest_header(g));
            for e in g.edges() {
                let _ = write!(out, "\nHost {} is interested in task {}.", e.u, e.v - hosts);
            }
            out
        }
    };
    TextGtr { gtr: GtrId::Tset, body }
}

fn neighbor_lists(g: &Graph) -> Vec<Vec<(usize, u64)>> {
    g.adjacency()
}

/// Adjacency-list representation; nodes and neighbors ascending.
pub fn serialize_tlist(q: &Question) -> TextGtr {
    let g = &q.graph;
    let n = g.node_count();
    let adj = neighbor_lists(g);
    let join = |items: Vec<String>| items.join(", ");
    let body = match family(q.task) {
        Family::Undirected => {
            let mut out = format!(
                "{UNDIRECTED_INTRO} {}, and the edges are presented in an adjacent list format:",
                numbered(n)
            );
            for (u, list) in adj.iter().enumerate() {
                let items = join(list.iter().map(|(v, _)| v.to_string()).collect());
                if items.is_empty() {
                    let _ = write!(out, "\n{u} <->");
                } else {
                    let _ = write!(out, "\n{u} <-> {items}");
                }
            }
            out.push_str(&attributes(q));
            out
        }
        Family::Ordering => {
            let mut out = format!("{}:", ordering_header(n));
            for (u, list) in adj.iter().enumerate().filter(|(_, l)| !l.is_empty()) {
                let items = join(list.iter().map(|(v, _)| v.to_string()).collect());
                let _ = write!(out, "\nnode {u} should be visited before node {items}");
            }
            out
        }
        Family::Distance | Family::Capacity => {
            let label = if family(q.task) == Family::Distance { "distance" } else { "capacity" };
            let mut out = format!(
                "{} presented in an adjacent list format:",
                weighted_header(family(q.task) == Family::Capacity, n)
            );
            for (u, list) in adj.iter().enumerate() {
                let items = join(
                    list.iter()
                        .map(|(v, w)| format!("node {v} with {label}: {w}"))
                        .collect(),
                );
                if items.is_empty() {
                    let _ = write!(out, "\nnode {u} is connected to:");
                } else {
                    let _ = write!(out, "\nnode {u} is connected to: {items}");
                }
            }
            out
        }
        Family::Interest => {
            let hosts = g.bipartite_split().map_or(0, |s| s.0);
            let mut out = format!("{}:", interest_header(g));
            for (h, list) in adj.iter().enumerate().take(hosts).filter(|(_, l)| !l.is_empty()) {
                let noun = if list.len() == 1 { "task" } else { "tasks" };
                let items = join(list.iter().map(|(v, _)| (v - hosts).to_string()).collect());
                let _ = write!(out, "\nHost {h} is interested in {noun} {items}.");
            }
            out
        }
    };
    TextGtr { gtr: GtrId::Tlist, body }
}

fn matrix_rows(out: &mut String, row_label: &str, col_label: &str, rows: &[Vec<u64>], cols: usize) {
    let _ = write!(out, "\n:   {col_label}0");
    for j in 1..cols {
        let _ = write!(out, "    {j}");
    }
    for (i, row) in rows.iter().enumerate() {
        let _ = write!(out, "\n{row_label}{i}");
        for v in row {
            let _ = write!(out, "  {v}");
        }
    }
}

/// Adjacency-matrix representation; weighted tasks carry weights in cells.
pub fn serialize_tmat(q: &Question) -> TextGtr {
    let g = &q.graph;
    let n = g.node_count();
    let mut body;
    match family(q.task) {
        Family::Interest => {
            let (hosts, tasks) = g.bipartite_split().unwrap_or((n, 0));
            let mut grid = vec![vec![0u64; tasks]; hosts];
            for e in g.edges() {
                grid[e.u][e.v - hosts] = 1;
            }
            body = interest_header(g);
            matrix_rows(&mut body, "Host", "Task", &grid, tasks);
        }
        fam => {
            let weighted = matches!(fam, Family::Distance | Family::Capacity);
            let mut grid = vec![vec![0u64; n]; n];
            for e in g.edges() {
                let v = if weighted { weight(e) } else { 1 };
                grid[e.u][e.v] = v;
                if !g.is_directed() {
                    grid[e.v][e.u] = v;
                }
            }
            body = match fam {
                Family::Undirected => format!(
                    "{UNDIRECTED_INTRO} {}, and the edges are represented in an adjacent matrix format",
                    numbered(n)
                ),
                Family::Ordering => format!(
                    "{}, the edges are represented in an adjacent matrix format",
                    ordering_header(n)
                ),
                _ => format!(
                    "{} represented in an adjacent matrix format with weights",
                    weighted_header(fam == Family::Capacity, n)
                ),
            };
            matrix_rows(&mut body, "node", "node", &grid, n);
            body.push_str(&attributes(q));
        }
    }
    TextGtr { gtr: GtrId::Tmat, body }
}

// ---------------------------------------------------------------------------
// Parsing

struct Cursor<'a> {
    lines: Vec<&'a str>,
    pos: usize,
}

fn err(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError { line, column, message: message.into() }
}

impl<'a> Cursor<'a> {
    fn new(body: &'a str) -> Self {
        Cursor { lines: body.split('\n').collect(), pos: 0 }
    }

    fn line_no(&self) -> usize {
        self.pos + 1
    }

    fn next(&mut self) -> Option<&'a str> {
        let line = self.lines.get(self.pos).copied();
        if line.is_some() {
            self.pos += 1;
        }
        line
    }

    fn peek(&self) -> Option<&'a str> {
        self.lines.get(self.pos).copied()
    }

    fn require(&mut self) -> Result<&'a str, ParseError> {
        let line_no = self.line_no();
        self.next().ok_or_else(|| err(line_no, 1, "unexpected end of body"))
    }

    /// Remaining lines up to (not including) the attribute section.
    fn remaining(&mut self) -> Vec<(usize, &'a str)> {
        let mut out = Vec::new();
        while let Some(line) = self.peek() {
            if line == "The node attributes are:" {
                break;
            }
            out.push((self.line_no(), line));
            self.pos += 1;
        }
        out
    }
}

/// Strips `prefix`, reporting the first mismatching column.
fn strip<'a>(line_no: usize, line: &'a str, prefix: &str) -> Result<&'a str, ParseError> {
    line.strip_prefix(prefix).ok_or_else(|| {
        let column = line
            .chars()
            .zip(prefix.chars())
            .take_while(|(a, b)| a == b)
            .count()
            + 1;
        err(line_no, column, format!("expected {prefix:?}"))
    })
}

fn number<T: std::str::FromStr>(line_no: usize, column: usize, tok: &str) -> Result<T, ParseError> {
    tok.trim()
        .parse::<T>()
        .map_err(|_| err(line_no, column, format!("expected a number, found {tok:?}")))
}

/// Reads a leading integer, returning it and the rest of the text.
fn leading_number<'a>(line_no: usize, column: usize, text: &'a str) -> Result<(usize, &'a str), ParseError> {
    let end = text.find(|c: char| !c.is_ascii_digit()).unwrap_or(text.len());
    if end == 0 {
        return Err(err(line_no, column, "expected a number"));
    }
    Ok((text[..end].parse().expect("digits"), &text[end..]))
}

fn column_of(line: &str, rest: &str) -> usize {
    line.len() - rest.len() + 1
}

fn node_count_from(line_no: usize, line: &str, marker: &str) -> Result<usize, ParseError> {
    let at = line
        .find(marker)
        .ok_or_else(|| err(line_no, 1, format!("missing {marker:?}")))?;
    let rest = &line[at + marker.len()..];
    let (last, _) = leading_number(line_no, column_of(line, rest), rest)?;
    Ok(last + 1)
}

fn parse_interest_header(line_no: usize, line: &str) -> Result<(usize, usize, &str), ParseError> {
    let rest = strip(line_no, line, "There are ")?;
    let (hosts, rest) = leading_number(line_no, column_of(line, rest), rest)?;
    let at = rest
        .find(", and ")
        .ok_or_else(|| err(line_no, column_of(line, rest), "missing task count"))?;
    let rest = &rest[at + ", and ".len()..];
    let (tasks, rest) = leading_number(line_no, column_of(line, rest), rest)?;
    Ok((hosts, tasks, rest))
}

fn build(n: usize, directed: bool, edges: Vec<Edge>, split: Option<(usize, usize)>, line_no: usize) -> Result<Graph, ParseError> {
    Graph::new(n, directed, edges, split).map_err(|e| err(line_no, 1, e.to_string()))
}

/// Inverse of [`serialize_tset`].
pub fn parse_tset(body: &str, task: TaskKind) -> Result<Graph, ParseError> {
    let mut cur = Cursor::new(body);
    let header = cur.require()?;
    match family(task) {
        Family::Undirected => {
            let n = node_count_from(1, header, "numbered from 0 to ")?;
            strip(1, header, UNDIRECTED_INTRO)?;
            let line_no = cur.line_no();
            let line = cur.require()?;
            let mut edges = Vec::new();
            if !line.is_empty() {
                let mut offset = 0;
                for item in line.split(" , ") {
                    let column = offset + 1;
                    offset += item.len() + 3;
                    let inner = item
                        .strip_prefix('(')
                        .and_then(|s| s.strip_suffix(')'))
                        .ok_or_else(|| err(line_no, column, format!("malformed edge {item:?}")))?;
                    let (u, v) = inner
                        .split_once(", ")
                        .ok_or_else(|| err(line_no, column, format!("malformed edge {item:?}")))?;
                    edges.push(Edge::new(number(line_no, column, u)?, number(line_no, column, v)?));
                }
            }
            build(n, false, edges, None, line_no)
        }
        Family::Ordering => {
            let n = node_count_from(1, header, "numbered from 0 to ")?;
            let mut edges = Vec::new();
            for (line_no, line) in cur.remaining() {
                let rest = strip(line_no, line, "node ")?;
                let (u, rest2) = leading_number(line_no, column_of(line, rest), rest)?;
                let rest3 = strip(line_no, rest2, " should be visited before node ")
                    .map_err(|e| err(line_no, column_of(line, rest2), e.message))?;
                edges.push(Edge::new(u, number(line_no, column_of(line, rest3), rest3)?));
            }
            build(n, true, edges, None, 1)
        }
        Family::Distance | Family::Capacity => {
            let capacity = family(task) == Family::Capacity;
            let n = node_count_from(1, header, "numbered from 0 to ")?;
            let (lead, mid, tail) = if capacity {
                ("an edge from node ", " to node ", " with capacity ")
            } else {
                ("an edge between node ", " and node ", " with weight ")
            };
            let mut edges = Vec::new();
            for (line_no, line) in cur.remaining() {
                if line.is_empty() {
                    continue;
                }
                let body = line.strip_suffix(',').unwrap_or(line);
                let rest = strip(line_no, body, lead)?;
                let (u, rest) = leading_number(line_no, column_of(line, rest), rest)?;
                let rest = strip(line_no, rest, mid).map_err(|e| err(line_no, column_of(line, rest), e.message))?;
                let (v, rest) = leading_number(line_no, column_of(line, rest), rest)?;
                let rest = strip(line_no, rest, tail).map_err(|e| err(line_no, column_of(line, rest), e.message))?;
                edges.push(Edge::weighted(u, v, number(line_no, column_of(line, rest), rest)?));
            }
            build(n, capacity, edges, None, 1)
        }
        Family::Interest => {
            let (hosts, tasks, _) = parse_interest_header(1, header)?;
            let mut edges = Vec::new();
            for (line_no, line) in cur.remaining() {
                let rest = strip(line_no, line, "Host ")?;
                let (h, rest2) = leading_number(line_no, column_of(line, rest), rest)?;
                let rest3 = strip(line_no, rest2, " is interested in task ")
                    .map_err(|e| err(line_no, column_of(line, rest2), e.message))?;
                let t: usize = number(line_no, column_of(line, rest3), rest3.trim_end_matches('.'))?;
                edges.push(Edge::new(h, hosts + t));
            }
            build(hosts + tasks, true, edges, Some((hosts, tasks)), 1)
        }
    }
}

fn split_items(line_no: usize, line: &str, rest: &str) -> Result<Vec<usize>, ParseError> {
    let rest = rest.trim();
    if rest.is_empty() {
        return Ok(Vec::new());
    }
    rest.split(", ")
        .map(|tok| number(line_no, column_of(line, rest), tok))
        .collect()
}

/// Inverse of [`serialize_tlist`].
pub fn parse_tlist(body: &str, task: TaskKind) -> Result<Graph, ParseError> {
    let mut cur = Cursor::new(body);
    let header = cur.require()?;
    match family(task) {
        Family::Undirected => {
            let n = node_count_from(1, header, "numbered from 0 to ")?;
            let mut pairs = BTreeSet::new();
            for (line_no, line) in cur.remaining() {
                let (u, rest) = leading_number(line_no, 1, line)?;
                let rest = strip(line_no, rest, " <->").map_err(|e| err(line_no, column_of(line, rest), e.message))?;
                for v in split_items(line_no, line, rest)? {
                    pairs.insert((u.min(v), u.max(v)));
                }
            }
            let edges = pairs.into_iter().map(|(u, v)| Edge::new(u, v)).collect();
            build(n, false, edges, None, 1)
        }
        Family::Ordering => {
            let n = node_count_from(1, header, "numbered from 0 to ")?;
            let mut edges = Vec::new();
            for (line_no, line) in cur.remaining() {
                let rest = strip(line_no, line, "node ")?;
                let (u, rest2) = leading_number(line_no, column_of(line, rest), rest)?;
                let rest3 = strip(line_no, rest2, " should be visited before node ")
                    .map_err(|e| err(line_no, column_of(line, rest2), e.message))?;
                for v in split_items(line_no, line, rest3)? {
                    edges.push(Edge::new(u, v));
                }
            }
            build(n, true, edges, None, 1)
        }
        Family::Distance | Family::Capacity => {
            let capacity = family(task) == Family::Capacity;
            let label = if capacity { " with capacity: " } else { " with distance: " };
            let n = node_count_from(1, header, "numbered from 0 to ")?;
            let mut seen = BTreeSet::new();
            let mut edges = Vec::new();
            for (line_no, line) in cur.remaining() {
                let rest = strip(line_no, line, "node ")?;
                let (u, rest2) = leading_number(line_no, column_of(line, rest), rest)?;
                let rest3 = strip(line_no, rest2, " is connected to:")
                    .map_err(|e| err(line_no, column_of(line, rest2), e.message))?;
                let items = rest3.trim();
                if items.is_empty() {
                    continue;
                }
                for item in items.split(", ") {
                    let column = column_of(line, items);
                    let entry = strip(line_no, item, "node ").map_err(|e| err(line_no, column, e.message))?;
                    let (v, w) = entry
                        .split_once(label)
                        .ok_or_else(|| err(line_no, column, format!("malformed entry {item:?}")))?;
                    let v: usize = number(line_no, column, v)?;
                    let w: u32 = number(line_no, column, w)?;
                    let key = if capacity { (u, v) } else { (u.min(v), u.max(v)) };
                    if seen.insert(key) {
                        edges.push(Edge::weighted(key.0, key.1, w));
                    }
                }
            }
            build(n, capacity, edges, None, 1)
        }
        Family::Interest => {
            let (hosts, tasks, _) = parse_interest_header(1, header)?;
            let mut edges = Vec::new();
            for (line_no, line) in cur.remaining() {
                let rest = strip(line_no, line, "Host ")?;
                let (h, rest2) = leading_number(line_no, column_of(line, rest), rest)?;
                let rest3 = rest2
                    .strip_prefix(" is interested in tasks ")
                    .or_else(|| rest2.strip_prefix(" is interested in task "))
                    .ok_or_else(|| err(line_no, column_of(line, rest2), "expected interest list"))?;
                for t in split_items(line_no, line, rest3.trim_end_matches('.'))? {
                    edges.push(Edge::new(h, hosts + t));
                }
            }
            build(hosts + tasks, true, edges, Some((hosts, tasks)), 1)
        }
    }
}

fn parse_matrix(
    cur: &mut Cursor<'_>,
    row_label: &str,
    rows: usize,
    cols: usize,
) -> Result<Vec<Vec<u64>>, ParseError> {
    let header_no = cur.line_no();
    let header = cur.require()?;
    let cells = header.split_whitespace().count();
    if !header.starts_with(':') || (cols > 0 && cells != cols + 1) {
        return Err(err(header_no, 1, "malformed matrix header"));
    }
    let mut grid = Vec::with_capacity(rows);
    for i in 0..rows {
        let line_no = cur.line_no();
        let line = cur.require()?;
        let rest = strip(line_no, line, &format!("{row_label}{i}"))?;
        let values: Vec<u64> = rest
            .split_whitespace()
            .map(|tok| number(line_no, column_of(line, rest), tok))
            .collect::<Result<_, _>>()?;
        if values.len() != cols {
            return Err(err(line_no, 1, format!("expected {cols} entries, found {}", values.len())));
        }
        grid.push(values);
    }
    Ok(grid)
}

/// Inverse of [`serialize_tmat`].
pub fn parse_tmat(body: &str, task: TaskKind) -> Result<Graph, ParseError> {
    let mut cur = Cursor::new(body);
    let header = cur.require()?;
    match family(task) {
        Family::Interest => {
            let (hosts, tasks, _) = parse_interest_header(1, header)?;
            let grid = parse_matrix(&mut cur, "Host", hosts, tasks)?;
            let mut edges = Vec::new();
            for (h, row) in grid.iter().enumerate() {
                for (t, &v) in row.iter().enumerate() {
                    if v != 0 {
                        edges.push(Edge::new(h, hosts + t));
                    }
                }
            }
            build(hosts + tasks, true, edges, Some((hosts, tasks)), 1)
        }
        fam => {
            let n = node_count_from(1, header, "numbered from 0 to ")?;
            let directed = matches!(fam, Family::Ordering | Family::Capacity);
            let weighted = matches!(fam, Family::Distance | Family::Capacity);
            let first_row = cur.line_no() + 1;
            let grid = parse_matrix(&mut cur, "node", n, n)?;
            let mut edges = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    let v = grid[i][j];
                    if !directed && grid[j][i] != v {
                        return Err(err(first_row + i, 1, format!("matrix is not symmetric at ({i}, {j})")));
                    }
                    if v == 0 || (!directed && j < i) {
                        continue;
                    }
                    if i == j {
                        return Err(err(first_row + i, 1, "non-zero diagonal entry"));
                    }
                    edges.push(if weighted {
                        let w = u32::try_from(v).map_err(|_| err(first_row + i, 1, "weight too large"))?;
                        Edge::weighted(i, j, w)
                    } else {
                        Edge::new(i, j)
                    });
                }
            }
            build(n, directed, edges, None, 1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tasks::GroundTruth;

    fn q(task: TaskKind, graph: Graph) -> Question {
        Question { id: "t".into(), task, graph, params: TaskParams::None, ground_truth: GroundTruth::Checker }
    }

    fn undirected(n: usize, edges: &[(usize, usize)]) -> Graph {
        Graph::new(n, false, edges.iter().map(|&(u, v)| Edge::new(u, v)).collect(), None).unwrap()
    }

    #[test]
    fn tset_edge_line() {
        let body = serialize_tset(&q(TaskKind::Conn, undirected(3, &[(0, 1), (1, 2)]))).body;
        assert!(body.contains("the edges are:\n(0, 1) , (1, 2)"), "{body}");
        assert!(body.starts_with(UNDIRECTED_INTRO));
        assert!(body.contains("numbered from 0 to 2"));
    }

    #[test]
    fn tset_empty_graph() {
        let question = q(TaskKind::Cyc, undirected(3, &[]));
        let body = serialize_tset(&question).body;
        assert!(body.ends_with("the edges are:\n"));
        assert_eq!(parse_tset(&body, TaskKind::Cyc).unwrap(), question.graph);
    }

    #[test]
    fn tlist_lines() {
        let body = serialize_tlist(&q(TaskKind::Conn, undirected(4, &[(0, 1), (1, 2)]))).body;
        let lines: Vec<&str> = body.lines().skip(1).collect();
        assert_eq!(lines, vec!["0 <-> 1", "1 <-> 0, 2", "2 <-> 1", "3 <->"]);
    }

    #[test]
    fn tmat_rows() {
        let body = serialize_tmat(&q(TaskKind::Conn, undirected(3, &[(0, 1), (0, 2), (1, 2)]))).body;
        let lines: Vec<&str> = body.lines().skip(1).collect();
        assert_eq!(lines, vec![":   node0    1    2", "node0  0  1  1", "node1  1  0  1", "node2  1  1  0"]);

        let directed = Graph::new(3, true, vec![Edge::new(0, 1)], None).unwrap();
        let body = serialize_tmat(&q(TaskKind::TS, directed.clone())).body;
        let lines: Vec<&str> = body.lines().skip(2).collect();
        assert_eq!(lines, vec!["node0  0  1  0", "node1  0  0  0", "node2  0  0  0"]);
        assert_eq!(parse_tmat(&body, TaskKind::TS).unwrap(), directed);
    }

    #[test]
    fn weighted_templates() {
        let g = Graph::new(3, false, vec![Edge::weighted(0, 1, 4), Edge::weighted(1, 2, 9)], None).unwrap();
        let sp = q(TaskKind::SP, g);
        let set = serialize_tset(&sp).body;
        assert!(set.ends_with(
            "an edge between node 0 and node 1 with weight 4,\nan edge between node 1 and node 2 with weight 9"
        ));
        let list = serialize_tlist(&sp).body;
        assert!(list.contains("node 1 is connected to: node 0 with distance: 4, node 2 with distance: 9"));
        for (body, parse) in [
            (set, parse_tset as fn(&str, TaskKind) -> Result<Graph, ParseError>),
            (list, parse_tlist),
            (serialize_tmat(&sp).body, parse_tmat),
        ] {
            assert_eq!(parse(&body, TaskKind::SP).unwrap(), sp.graph);
        }
    }

    #[test]
    fn interest_templates() {
        let g = Graph::new(5, true, vec![Edge::new(0, 2), Edge::new(0, 4), Edge::new(1, 3)], Some((2, 3))).unwrap();
        let bgm = q(TaskKind::BGM, g);
        let set = serialize_tset(&bgm).body;
        assert!(set.contains("Host 0 is interested in task 2."));
        let list = serialize_tlist(&bgm).body;
        assert!(list.contains("Host 0 is interested in tasks 0, 2."));
        assert!(list.contains("Host 1 is interested in task 1."));
        let mat = serialize_tmat(&bgm).body;
        assert!(mat.contains(":   Task0    1    2\nHost0  1  0  1\nHost1  0  1  0"));
        assert_eq!(parse_tset(&set, TaskKind::BGM).unwrap(), bgm.graph);
        assert_eq!(parse_tlist(&list, TaskKind::BGM).unwrap(), bgm.graph);
        assert_eq!(parse_tmat(&mat, TaskKind::BGM).unwrap(), bgm.graph);
    }

    #[test]
    fn node_attributes_do_not_disturb_parsing() {
        let mut question = q(TaskKind::NC, undirected(3, &[(0, 1)]));
        question.params = TaskParams::NodeClass {
            target: 0,
            classes: vec!["Class 0".into()],
            known: [(1, "Class 0".to_string())].into(),
        };
        for (body, parse) in [
            (serialize_tset(&question).body, parse_tset as fn(&str, TaskKind) -> Result<Graph, ParseError>),
            (serialize_tlist(&question).body, parse_tlist),
            (serialize_tmat(&question).body, parse_tmat),
        ] {
            assert!(body.ends_with("The node attributes are:\nNode 1, Attribute Class 0"));
            assert_eq!(parse(&body, TaskKind::NC).unwrap(), question.graph);
        }
    }

    #[test]
    fn parse_errors_carry_position() {
        let e = parse_tset("In an undirected graph, nodes", TaskKind::Conn).unwrap_err();
        assert_eq!(e.line, 1);
        let body = format!("{UNDIRECTED_INTRO} The nodes are numbered from 0 to 2, and the edges are:\n(0, 1) , (1 2)");
        let e = parse_tset(&body, TaskKind::Conn).unwrap_err();
        assert_eq!((e.line, e.column), (2, 10));
        let e = parse_tmat(
            &format!("{UNDIRECTED_INTRO} The nodes are numbered from 0 to 1, and the edges are represented in an adjacent matrix format\n:   node0    1\nnode0  0  1\nnode1  0  0"),
            TaskKind::Conn,
        )
        .unwrap_err();
        assert!(e.message.contains("symmetric"));
    }
}
