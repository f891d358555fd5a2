//! Browser bindings for the demo page in `www/`.
//!
//! The plain functions do the work and are tested natively; the
//! `#[wasm_bindgen]` wrappers only convert errors for JavaScript.

use gtr_core::graph::{parse_edge_list, ErConfig};
use gtr_core::gtr::{
    layout_circo, layout_dot, layout_fdp, layout_neato, layout_sfdp, render_gtr, render_svg, GtrPayload, Style,
};
use gtr_core::preference::{gre, GreParams, LogBase};
use gtr_core::tasks::{generate_question, render_instruction, TaskKind};
use gtr_core::GtrId;
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Layouts are quadratic per iteration; keep pasted graphs small.
pub const MAX_PASTED_NODES: usize = 150;

#[derive(Debug, Serialize)]
pub struct RenderedQuestion {
    pub task: String,
    pub gtr: String,
    pub nodes: usize,
    pub edges: usize,
    pub instruction: String,
    pub answer: String,
    /// "text" or "svg".
    pub kind: &'static str,
    pub body: String,
}

/// Generates a small question for `task` and renders it with `gtr`.
pub fn question(task: &str, gtr: &str, seed: u64) -> Result<RenderedQuestion, String> {
    let task: TaskKind = task.parse().map_err(|e| format!("{e}"))?;
    let gtr: GtrId = gtr.parse()?;
    let cfg = ErConfig { node_range: (5, 12), edge_probability_range: (0.2, 0.5), ..Default::default() };
    let q = generate_question(task, &cfg, seed).map_err(|e| e.to_string())?;
    let (kind, body) = match render_gtr(&q, gtr, seed) {
        GtrPayload::Text(t) => ("text", t.body),
        GtrPayload::Visual(v) => ("svg", v.svg),
    };
    Ok(RenderedQuestion {
        task: task.name().to_string(),
        gtr: gtr.name().to_string(),
        nodes: q.graph.node_count(),
        edges: q.graph.edge_count(),
        instruction: render_instruction(&q),
        answer: q.reference_answer().render(),
        kind,
        body,
    })
}

/// Lays out a pasted `u v [w]` edge list with one of the visual engines.
pub fn edge_list_svg(text: &str, gtr: &str, directed: bool) -> Result<String, String> {
    let gtr: GtrId = gtr.parse()?;
    let parsed = parse_edge_list(text, directed).map_err(|e| e.to_string())?;
    let g = &parsed.graph;
    if g.node_count() > MAX_PASTED_NODES {
        return Err(format!("{} nodes; the demo draws at most {MAX_PASTED_NODES}", g.node_count()));
    }
    let layout = match gtr {
        GtrId::Vdot => layout_dot(g, 0),
        GtrId::Vneato => layout_neato(g, 0),
        GtrId::Vcirco => layout_circo(g),
        GtrId::Vfdp => layout_fdp(g, 0),
        GtrId::Vsfdp => layout_sfdp(g, 0),
        other => return Err(format!("{other} is a textual GTR")),
    };
    Ok(render_svg(g, &layout, &Style::default(), gtr).svg)
}

/// GRE of one response.
pub fn gre_value(correct: bool, tokens: u64, alpha: f64, base_two: bool) -> Result<f64, String> {
    let params = GreParams {
        alpha,
        log_base: if base_two { LogBase::Two } else { LogBase::Natural },
        ..Default::default()
    };
    gre(correct as u8, tokens, &params).map_err(|e| e.to_string())
}

/// JSON-encoded [`RenderedQuestion`].
#[wasm_bindgen(js_name = renderQuestion)]
pub fn render_question(task: &str, gtr: &str, seed: u32) -> Result<String, JsError> {
    let q = question(task, gtr, seed as u64).map_err(|e| JsError::new(&e))?;
    serde_json::to_string(&q).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen(js_name = layoutEdgeList)]
pub fn layout_edge_list(text: &str, gtr: &str, directed: bool) -> Result<String, JsError> {
    edge_list_svg(text, gtr, directed).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = greScore)]
pub fn gre_score(correct: bool, tokens: f64, alpha: f64, base_two: bool) -> Result<f64, JsError> {
    if !(tokens >= 1.0) || tokens.fract() != 0.0 {
        return Err(JsError::new("tokens must be a whole number of at least 1"));
    }
    gre_value(correct, tokens as u64, alpha, base_two).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_pair_renders() {
        for task in ["Conn", "Cyc", "TS", "SP", "MF", "BGM", "HP"] {
            for g in GtrId::POOL {
                let r = question(task, g.name(), 3).unwrap();
                assert_eq!(r.kind == "svg", g.is_visual(), "{task} {g}");
                assert!(r.body.len() > 10);
                assert!(!r.answer.is_empty());
            }
        }
    }

    #[test]
    fn pasted_edge_list() {
        let svg = edge_list_svg("a b\nb c 3\n", "Vcirco", false);
        // Mixed weighted and unweighted lines drop weights rather than fail.
        assert!(svg.unwrap().starts_with("<svg"));
        assert!(edge_list_svg("1 2\n2 3\n", "Tset", false).is_err());
        assert!(edge_list_svg("1 2 3 4\n", "Vdot", true).is_err());
        let big: String = (0..200).map(|i| format!("{i} {}\n", i + 1)).collect();
        assert!(edge_list_svg(&big, "Vneato", false).is_err());
    }

    #[test]
    fn gre_matches_the_formula() {
        let v = gre_value(true, 100, 0.5, false).unwrap();
        assert!((v - (101f64.ln() - 0.5 * 100f64.ln())).abs() < 1e-12);
        let b = gre_value(false, 8, 1.0, true).unwrap();
        assert!((b + 3.0).abs() < 1e-12);
        assert!(gre_value(true, 0, 0.5, false).is_err());
    }
}
