//! Core of the dynamic graph-topology-representation toolkit.
//!
//! The crate covers the whole offline side of the pipeline:
//!
//! * [`graph`]: the topology type, Erdős–Rényi generation, k-hop extraction
//!   and edge-list ingestion.
//! * [`tasks`]: question instantiation for the graph-QA tasks together with
//!   their task and control instructions.
//! * [`oracles`]: exact solvers and answer checkers.
//! * [`gtr`]: the eight representations, three textual and five visual.
//! * [`reasoner`]: the reasoner abstraction and a deterministic mock.
//! * [`preference`]: GRE scoring and preference dataset construction.
//! * [`router`]: features and the multi-label GTR router.

pub mod gtr;
pub mod graph;
pub mod oracles;
pub mod preference;
pub mod reasoner;
pub mod rng;
pub mod router;
pub mod tasks;

pub use graph::{Edge, ErConfig, Graph, GraphError};
pub use gtr::GtrId;
pub use tasks::{GroundTruth, Question, TaskKind, TaskParams};
