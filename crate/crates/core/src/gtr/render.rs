//! Drawing a laid-out graph: a backend-neutral scene, SVG text and DOT source.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::layout::{Layout, NODE_RADIUS};
use super::GtrId;
use crate::graph::Graph;

/// Fixed drawing style shared by every visual GTR. Only positions differ
/// between layouts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Style {
    pub background: String,
    pub node_fill: String,
    pub stroke: String,
    pub stroke_width: f64,
    pub node_radius: f64,
    pub font_size: f64,
    pub arrow_size: f64,
}

impl Default for Style {
    fn default() -> Self {
        Style {
            background: "white".into(),
            node_fill: "white".into(),
            stroke: "black".into(),
            stroke_width: 1.0,
            node_radius: NODE_RADIUS,
            font_size: 10.0,
            arrow_size: 8.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NodeShape {
    Circle,
    /// Hosts in bipartite matching drawings.
    Square,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeGlyph {
    pub center: (f64, f64),
    pub shape: NodeShape,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeGlyph {
    pub start: (f64, f64),
    pub end: (f64, f64),
    /// Arrowhead triangle, tip first. Present iff the graph is directed.
    pub arrow: Option<[(f64, f64); 3]>,
    /// Weight text and the center it is drawn at.
    pub weight: Option<(String, (f64, f64))>,
}

/// Everything needed to draw a visual GTR with any backend.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub width: f64,
    pub height: f64,
    pub style: Style,
    pub nodes: Vec<NodeGlyph>,
    pub edges: Vec<EdgeGlyph>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VisualGtr {
    pub gtr: GtrId,
    pub dot_source: String,
    pub svg: String,
    pub scene: Scene,
}

/// Lays glyphs out on the canvas: edges are clipped at node borders and
/// weight labels sit just beside the edge midpoint.
pub fn build_scene(g: &Graph, layout: &Layout, style: &Style) -> Scene {
    let r = style.node_radius;
    let hosts = g.bipartite_split().map(|(h, _)| h).unwrap_or(0);
    let nodes = layout
        .positions
        .iter()
        .enumerate()
        .map(|(i, &center)| NodeGlyph {
            center,
            shape: if i < hosts { NodeShape::Square } else { NodeShape::Circle },
            label: i.to_string(),
        })
        .collect();
    let edges = g
        .edges()
        .iter()
        .map(|e| {
            let (a, b) = (layout.positions[e.u], layout.positions[e.v]);
            let (dx, dy) = (b.0 - a.0, b.1 - a.1);
            let len = dx.hypot(dy).max(1e-9);
            let (ux, uy) = (dx / len, dy / len);
            let start = (a.0 + ux * r, a.1 + uy * r);
            let end = (b.0 - ux * r, b.1 - uy * r);
            let arrow = g.is_directed().then(|| {
                let s = style.arrow_size;
                let base = (end.0 - ux * s, end.1 - uy * s);
                let (px, py) = (-uy * s / 2.0, ux * s / 2.0);
                [end, (base.0 + px, base.1 + py), (base.0 - px, base.1 - py)]
            });
            let weight = e.weight.map(|w| {
                let mid = ((a.0 + b.0) / 2.0, (a.1 + b.1) / 2.0);
                let offset = r / 2.0;
                (w.to_string(), (mid.0 - uy * offset, mid.1 + ux * offset))
            });
            EdgeGlyph { start, end, arrow, weight }
        })
        .collect();
    Scene { width: layout.width, height: layout.height, style: style.clone(), nodes, edges }
}

fn num(x: f64) -> String {
    format!("{x:.2}")
}

/// SVG 1.1 text for a scene. Nodes carry `class="node"`, edges
/// `class="edge"` and weight labels `class="weight"`.
pub fn scene_to_svg(scene: &Scene) -> String {
    let s = &scene.style;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = num(scene.width),
        h = num(scene.height)
    );
    let _ = writeln!(
        out,
        r#"<rect class="background" x="0" y="0" width="{}" height="{}" fill="{}"/>"#,
        num(scene.width),
        num(scene.height),
        s.background
    );
    let directed = scene.edges.iter().any(|e| e.arrow.is_some());
    if directed {
        let a = num(s.arrow_size);
        let _ = writeln!(
            out,
            r#"<defs><marker id="arrow" viewBox="0 0 10 10" refX="10" refY="5" markerUnits="userSpaceOnUse" markerWidth="{a}" markerHeight="{a}" orient="auto"><polygon points="0,0 10,5 0,10" fill="{}"/></marker></defs>"#,
            s.stroke
        );
    }
    out.push_str("<g class=\"edges\">\n");
    for e in &scene.edges {
        let marker = if e.arrow.is_some() { r#" marker-end="url(#arrow)""# } else { "" };
        let _ = writeln!(
            out,
            r#"<path class="edge" d="M {} {} L {} {}" stroke="{}" stroke-width="{}" fill="none"{marker}/>"#,
            num(e.start.0),
            num(e.start.1),
            num(e.end.0),
            num(e.end.1),
            s.stroke,
            num(s.stroke_width)
        );
    }
    for e in &scene.edges {
        if let Some((text, (x, y))) = &e.weight {
            let _ = writeln!(
                out,
                r#"<text class="weight" x="{}" y="{}" font-size="{}" text-anchor="middle" dominant-baseline="central" fill="{}">{text}</text>"#,
                num(*x),
                num(*y),
                num(s.font_size),
                s.stroke
            );
        }
    }
    out.push_str("</g>\n<g class=\"nodes\">\n");
    let r = s.node_radius;
    for n in &scene.nodes {
        let (x, y) = n.center;
        match n.shape {
            NodeShape::Circle => {
                let _ = writeln!(
                    out,
                    r#"<circle class="node" cx="{}" cy="{}" r="{}" fill="{}" stroke="{}" stroke-width="{}"/>"#,
                    num(x),
                    num(y),
                    num(r),
                    s.node_fill,
                    s.stroke,
                    num(s.stroke_width)
                );
            }
            NodeShape::Square => {
                let _ = writeln!(
                    out,
                    r#"<rect class="node" x="{}" y="{}" width="{}" height="{}" fill="{}" stroke="{}" stroke-width="{}"/>"#,
                    num(x - r),
                    num(y - r),
                    num(2.0 * r),
                    num(2.0 * r),
                    s.node_fill,
                    s.stroke,
                    num(s.stroke_width)
                );
            }
        }
        let _ = writeln!(
            out,
            r#"<text class="label" x="{}" y="{}" font-size="{}" text-anchor="middle" dominant-baseline="central" fill="{}">{}</text>"#,
            num(x),
            num(y),
            num(s.font_size),
            s.stroke,
            n.label
        );
    }
    out.push_str("</g>\n</svg>\n");
    out
}

/// Renders `g` with positions from `layout` into SVG and DOT.
pub fn render_svg(g: &Graph, layout: &Layout, style: &Style, gtr: GtrId) -> VisualGtr {
    let scene = build_scene(g, layout, style);
    VisualGtr {
        gtr,
        dot_source: emit_dot(g, gtr.engine().unwrap_or("dot")),
        svg: scene_to_svg(&scene),
        scene,
    }
}

/// DOT source that reproduces the drawing style with an external Graphviz
/// binary, e.g. `dot -Tpng`.
pub fn emit_dot(g: &Graph, engine: &str) -> String {
    let (keyword, arrow) = if g.is_directed() { ("digraph", "->") } else { ("graph", "--") };
    let hosts = g.bipartite_split().map(|(h, _)| h).unwrap_or(0);
    let mut out = format!("{keyword} G {{\n");
    let _ = writeln!(out, "  layout={engine};");
    out.push_str("  bgcolor=white;\n");
    out.push_str("  node [shape=circle, style=filled, fillcolor=white, color=black, fontsize=10];\n");
    for v in 0..g.node_count() {
        if v < hosts {
            let _ = writeln!(out, "  {v} [shape=box];");
        } else {
            let _ = writeln!(out, "  {v};");
        }
    }
    for e in g.edges() {
        match e.weight {
            Some(w) => {
                let _ = writeln!(out, "  {} {arrow} {} [label=\"{w}\"];", e.u, e.v);
            }
            None => {
                let _ = writeln!(out, "  {} {arrow} {};", e.u, e.v);
            }
        }
    }
    out.push_str("}\n");
    out
}
