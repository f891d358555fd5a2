//! The zero-shot GTR pool: five visual layouts and three textual encodings.

pub mod layout;
pub mod raster;
pub mod render;
pub mod text;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::tasks::Question;

pub use layout::{layout_circo, layout_dot, layout_fdp, layout_neato, layout_sfdp, Layout};
pub use render::{emit_dot, render_svg, Style, VisualGtr};
pub use text::{
    parse_tlist, parse_tmat, parse_tset, serialize_tlist, serialize_tmat, serialize_tset, ParseError,
    TextGtr,
};

/// Members of the pool, in canonical tie-break order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GtrId {
    Vdot,
    Vneato,
    Vcirco,
    Vfdp,
    Vsfdp,
    Tset,
    Tlist,
    Tmat,
}

impl GtrId {
    pub const POOL: [GtrId; 8] = [
        GtrId::Vdot,
        GtrId::Vneato,
        GtrId::Vcirco,
        GtrId::Vfdp,
        GtrId::Vsfdp,
        GtrId::Tset,
        GtrId::Tlist,
        GtrId::Tmat,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            GtrId::Vdot => "Vdot",
            GtrId::Vneato => "Vneato",
            GtrId::Vcirco => "Vcirco",
            GtrId::Vfdp => "Vfdp",
            GtrId::Vsfdp => "Vsfdp",
            GtrId::Tset => "Tset",
            GtrId::Tlist => "Tlist",
            GtrId::Tmat => "Tmat",
        }
    }

    pub fn is_visual(self) -> bool {
        self.index() < 5
    }

    /// Graphviz engine name for visual members.
    pub fn engine(self) -> Option<&'static str> {
        match self {
            GtrId::Vdot => Some("dot"),
            GtrId::Vneato => Some("neato"),
            GtrId::Vcirco => Some("circo"),
            GtrId::Vfdp => Some("fdp"),
            GtrId::Vsfdp => Some("sfdp"),
            _ => None,
        }
    }
}

impl fmt::Display for GtrId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GtrId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase().replace('_', "");
        GtrId::POOL
            .into_iter()
            .find(|g| g.name().to_ascii_lowercase() == key || g.engine() == Some(key.as_str()))
            .ok_or_else(|| format!("unknown GTR {s:?}"))
    }
}

/// A rendered representation ready to hand to a reasoner.
#[derive(Debug, Clone, PartialEq)]
pub enum GtrPayload {
    Text(TextGtr),
    Visual(VisualGtr),
}

impl GtrPayload {
    pub fn gtr(&self) -> GtrId {
        match self {
            GtrPayload::Text(t) => t.gtr,
            GtrPayload::Visual(v) => v.gtr,
        }
    }
}

/// Computes the layout a visual GTR uses for `q`.
pub fn visual_layout(q: &Question, gtr: GtrId, seed: u64) -> Option<Layout> {
    let g = &q.graph;
    Some(match gtr {
        GtrId::Vdot => layout_dot(g, seed),
        GtrId::Vneato => layout_neato(g, seed),
        GtrId::Vcirco => layout_circo(g),
        GtrId::Vfdp => layout_fdp(g, seed),
        GtrId::Vsfdp => layout_sfdp(g, seed),
        _ => return None,
    })
}

/// Renders `q` in representation `gtr`. `seed` drives the force layouts.
pub fn render_gtr(q: &Question, gtr: GtrId, seed: u64) -> GtrPayload {
    match gtr {
        GtrId::Tset => GtrPayload::Text(serialize_tset(q)),
        GtrId::Tlist => GtrPayload::Text(serialize_tlist(q)),
        GtrId::Tmat => GtrPayload::Text(serialize_tmat(q)),
        visual => {
            let layout = visual_layout(q, visual, seed).expect("visual member");
            GtrPayload::Visual(render_svg(&q.graph, &layout, &Style::default(), visual))
        }
    }
}
