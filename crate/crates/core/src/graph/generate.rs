use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::{Edge, Graph};
use crate::rng::{rng_from_seed, Rng};

/// Erdős–Rényi sampling ranges. All intervals are inclusive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ErConfig {
    pub node_range: (usize, usize),
    pub edge_probability_range: (f64, f64),
    pub weight_range: (u32, u32),
    pub seed: u64,
}

impl Default for ErConfig {
    fn default() -> Self {
        ErConfig {
            node_range: (3, 30),
            edge_probability_range: (0.1, 0.7),
            weight_range: (1, 10),
            seed: 0,
        }
    }
}

impl ErConfig {
    pub fn with_seed(&self, seed: u64) -> Self {
        ErConfig {
            seed,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        let (n_lo, n_hi) = self.node_range;
        let (p_lo, p_hi) = self.edge_probability_range;
        let (w_lo, w_hi) = self.weight_range;
        if n_lo == 0 || n_lo > n_hi {
            return Err(format!("invalid node range [{n_lo}, {n_hi}]"));
        }
        if !(0.0..=1.0).contains(&p_lo) || !(0.0..=1.0).contains(&p_hi) || p_lo > p_hi {
            return Err(format!("invalid edge probability range [{p_lo}, {p_hi}]"));
        }
        if w_lo == 0 || w_lo > w_hi {
            return Err(format!("invalid weight range [{w_lo}, {w_hi}]"));
        }
        Ok(())
    }

    pub(crate) fn sample_node_count(&self, rng: &mut Rng) -> usize {
        rng.gen_range(self.node_range.0..=self.node_range.1)
    }

    pub(crate) fn sample_probability(&self, rng: &mut Rng) -> f64 {
        let (lo, hi) = self.edge_probability_range;
        if lo == hi {
            lo
        } else {
            rng.gen_range(lo..=hi)
        }
    }

    fn sample_weight(&self, rng: &mut Rng) -> u32 {
        rng.gen_range(self.weight_range.0..=self.weight_range.1)
    }
}

/// Samples `G(N, p)` with `N` and `p` drawn once per graph.
///
/// Panics if the configuration ranges are empty.
pub fn generate_er_graph(cfg: &ErConfig, directed: bool, weighted: bool) -> Graph {
    if let Err(msg) = cfg.validate() {
        panic!("{msg}");
    }
    let mut rng = rng_from_seed(cfg.seed);
    let n = cfg.sample_node_count(&mut rng);
    let p = cfg.sample_probability(&mut rng);
    let mut edges = Vec::new();
    for u in 0..n {
        let targets: Box<dyn Iterator<Item = usize>> = if directed {
            Box::new((0..n).filter(move |&v| v != u))
        } else {
            Box::new(u + 1..n)
        };
        for v in targets {
            if rng.gen::<f64>() < p {
                let edge = if weighted {
                    Edge::weighted(u, v, cfg.sample_weight(&mut rng))
                } else {
                    Edge::new(u, v)
                };
                edges.push(edge);
            }
        }
    }
    Graph::new(n, directed, edges, None).expect("generated edges are valid by construction")
}

/// Samples a host/task interest graph: hosts `0..h`, tasks `h..n`, every
/// host→task arc kept with probability `p`. Requires `n >= 2`.
pub fn generate_bipartite_graph(cfg: &ErConfig) -> Graph {
    if let Err(msg) = cfg.validate() {
        panic!("{msg}");
    }
    let mut rng = rng_from_seed(cfg.seed);
    let n = cfg.sample_node_count(&mut rng).max(2);
    let p = cfg.sample_probability(&mut rng);
    let hosts = rng.gen_range(1..n);
    let mut edges = Vec::new();
    for u in 0..hosts {
        for v in hosts..n {
            if rng.gen::<f64>() < p {
                edges.push(Edge::new(u, v));
            }
        }
    }
    Graph::new(n, true, edges, Some((hosts, n - hosts)))
        .expect("generated edges are valid by construction")
}
