//! Experiment runner for GTR routing: question generation, reasoner
//! probing, preference-dataset construction, router training and
//! evaluation against fixed-GTR baselines.

pub mod config;
pub mod error;
pub mod eval;
pub mod http;
pub mod pipeline;
pub mod store;

pub use config::{EndpointKind, RunConfig};
pub use error::HarnessError;
pub use eval::{EvalCell, EvalReport, Method};
pub use pipeline::{reasoner_from_config, Pipeline, ProbeSummary};
