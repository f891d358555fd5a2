//! The reasoner abstraction: something that answers a rendered question.
//!
//! The HTTP client lives in the harness crate; this module holds the
//! request/response types, token accounting and the deterministic mock.

mod calibration;
mod mock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gtr::{render_gtr, GtrId, GtrPayload};
use crate::tasks::{render_instruction, Question};

pub use calibration::{reference_preferences, Calibration, ReferenceTable};
pub use mock::{ArmPolicy, MockPolicy, MockReasoner, PolicyArm};

pub const DEFAULT_TEMPERATURE: f64 = 0.7;
pub const DEFAULT_MAX_OUTPUT_TOKENS: u32 = 2048;

/// One chat turn for one (question, GTR) pair.
#[derive(Debug, Clone)]
pub struct ReasonerRequest {
    pub question: Question,
    pub gtr: GtrId,
    /// Task instruction followed by the control instruction.
    pub instruction: String,
    /// The rendered GTR. Reasoners that never look at it (the mock) may
    /// receive `None`.
    pub payload: Option<GtrPayload>,
    pub temperature: f64,
    pub max_output_tokens: u32,
}

impl ReasonerRequest {
    /// Builds the request, rendering the GTR only when `with_payload` is set.
    /// `layout_seed` drives the force-directed layouts.
    pub fn new(q: &Question, gtr: GtrId, with_payload: bool, layout_seed: u64) -> Self {
        ReasonerRequest {
            question: q.clone(),
            gtr,
            instruction: render_instruction(q),
            payload: with_payload.then(|| render_gtr(q, gtr, layout_seed)),
            temperature: DEFAULT_TEMPERATURE,
            max_output_tokens: DEFAULT_MAX_OUTPUT_TOKENS,
        }
    }

    /// Text part of the user message: the textual GTR body (if any) followed
    /// by the instruction. Visual GTRs send the instruction only, next to
    /// the image.
    pub fn prompt_text(&self) -> String {
        match &self.payload {
            Some(GtrPayload::Text(t)) => format!("{}\n{}", t.body, self.instruction),
            _ => self.instruction.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReasonerResponse {
    pub raw_text: String,
    /// Always at least 1.
    pub completion_tokens: u32,
    pub latency_ms: u64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReasonerError {
    #[error("transport error: {0}")]
    Transport(String),
    #[error("rate limited (retry after {retry_after_ms:?} ms)")]
    RateLimited { retry_after_ms: Option<u64> },
    #[error("malformed response: {0}")]
    MalformedResponse(String),
    #[error("reasoner configuration: {0}")]
    Config(String),
}

pub trait Reasoner: Send + Sync {
    /// Answers `req`. `trial` distinguishes repeated calls for the same
    /// request; sampling reasoners may ignore it.
    fn ask(&self, req: &ReasonerRequest, trial: usize) -> Result<ReasonerResponse, ReasonerError>;

    /// Whether requests must carry a rendered GTR.
    fn wants_payload(&self) -> bool {
        true
    }
}

/// `k` independent calls for the same request, trials `0..k`.
pub fn ask_k_trials(
    reasoner: &dyn Reasoner,
    req: &ReasonerRequest,
    k: usize,
) -> Result<Vec<ReasonerResponse>, ReasonerError> {
    (0..k).map(|trial| reasoner.ask(req, trial)).collect()
}

/// Offline token count: whitespace-separated pieces, at least 1.
pub fn whitespace_tokens(text: &str) -> u32 {
    (text.split_whitespace().count() as u32).max(1)
}
