use std::sync::atomic::{AtomicU64, Ordering};

use rand::Rng as _;
use rand_distr::{Distribution, LogNormal};
use serde::{Deserialize, Serialize};

use super::calibration::Calibration;
use super::{Reasoner, ReasonerError, ReasonerRequest, ReasonerResponse};
use crate::gtr::GtrId;
use crate::rng::{derive_seed, rng_from_seed};
use crate::tasks::TaskKind;

/// Behaviour of the mock for one (task, GTR) cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArmPolicy {
    /// Probability that an answer is correct.
    pub correctness: f64,
    /// Completion tokens follow `lognormal(token_mu, token_sigma)`.
    pub token_mu: f64,
    pub token_sigma: f64,
}

impl ArmPolicy {
    /// Lognormal token counts with the given median.
    pub fn new(correctness: f64, median_tokens: f64, token_sigma: f64) -> Self {
        ArmPolicy { correctness, token_mu: median_tokens.ln(), token_sigma }
    }

    fn validate(&self) -> Result<(), String> {
        if !(0.0..=1.0).contains(&self.correctness) {
            return Err(format!("correctness {} outside [0, 1]", self.correctness));
        }
        if !self.token_mu.is_finite() || !self.token_sigma.is_finite() || self.token_sigma < 0.0 {
            return Err(format!("invalid token distribution ({}, {})", self.token_mu, self.token_sigma));
        }
        Ok(())
    }
}

impl Default for ArmPolicy {
    fn default() -> Self {
        ArmPolicy::new(0.5, 300.0, 0.3)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyArm {
    pub task: TaskKind,
    pub gtr: GtrId,
    #[serde(flatten)]
    pub policy: ArmPolicy,
}

/// Scripted reasoner behaviour, loadable from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MockPolicy {
    pub seed: u64,
    #[serde(default)]
    pub default: ArmPolicy,
    /// Later entries override earlier ones for the same cell.
    #[serde(default)]
    pub arms: Vec<PolicyArm>,
    /// When present, calibrated tasks ignore `arms` and follow the bands.
    #[serde(default)]
    pub calibration: Option<Calibration>,
}

impl MockPolicy {
    pub fn new(seed: u64, default: ArmPolicy) -> Self {
        MockPolicy { seed, default, arms: Vec::new(), calibration: None }
    }

    pub fn calibrated(seed: u64, calibration: Calibration) -> Self {
        MockPolicy { calibration: Some(calibration), ..MockPolicy::new(seed, ArmPolicy::default()) }
    }

    pub fn with_arm(mut self, task: TaskKind, gtr: GtrId, policy: ArmPolicy) -> Self {
        self.arms.push(PolicyArm { task, gtr, policy });
        self
    }

    pub fn arm(&self, task: TaskKind, gtr: GtrId) -> &ArmPolicy {
        self.arms
            .iter()
            .rev()
            .find(|a| a.task == task && a.gtr == gtr)
            .map(|a| &a.policy)
            .unwrap_or(&self.default)
    }

    pub fn validate(&self) -> Result<(), String> {
        self.default.validate()?;
        for a in &self.arms {
            a.policy.validate().map_err(|e| format!("{}/{}: {e}", a.task, a.gtr))?;
        }
        if let Some(c) = &self.calibration {
            c.validate()?;
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, String> {
        let policy: MockPolicy = serde_json::from_str(text).map_err(|e| e.to_string())?;
        policy.validate()?;
        Ok(policy)
    }

    /// `(correct, tokens)` for one probe. A pure function of the policy and
    /// the arguments.
    pub fn outcome(&self, question_id: &str, task: TaskKind, gtr: GtrId, trial: usize) -> (bool, u32) {
        if let Some(favored) = self.calibration.as_ref().and_then(|c| c.favored(self.seed, question_id, task)) {
            let c = self.calibration.as_ref().expect("checked above");
            let tokens = if favored.contains(&gtr) { c.favored_tokens } else { c.other_tokens };
            return (true, tokens);
        }
        let arm = self.arm(task, gtr);
        let mut rng = rng_from_seed(derive_seed(self.seed, &format!("probe/{question_id}/{gtr}/{trial}")));
        let correct = rng.gen::<f64>() < arm.correctness;
        let tokens = if arm.token_sigma == 0.0 {
            arm.token_mu.exp()
        } else {
            LogNormal::new(arm.token_mu, arm.token_sigma).expect("validated").sample(&mut rng)
        };
        (correct, tokens.round().clamp(1.0, u32::MAX as f64) as u32)
    }
}

/// Deterministic reasoner driven by a [`MockPolicy`]. Correct answers come
/// from the question's oracle, wrong ones from a perturbation of it.
#[derive(Debug)]
pub struct MockReasoner {
    policy: MockPolicy,
    calls: AtomicU64,
}

impl MockReasoner {
    pub fn new(policy: MockPolicy) -> Self {
        MockReasoner { policy, calls: AtomicU64::new(0) }
    }

    pub fn policy(&self) -> &MockPolicy {
        &self.policy
    }

    /// Number of `ask` calls served so far.
    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }
}

impl Reasoner for MockReasoner {
    fn ask(&self, req: &ReasonerRequest, trial: usize) -> Result<ReasonerResponse, ReasonerError> {
        self.calls.fetch_add(1, Ordering::Relaxed);
        let q = &req.question;
        let (correct, tokens) = self.policy.outcome(&q.id, q.task, req.gtr, trial);
        let answer = if correct { q.reference_answer() } else { q.wrong_answer() };
        Ok(ReasonerResponse {
            raw_text: format!("<answer>{}</answer>", answer.render()),
            completion_tokens: tokens,
            latency_ms: 0,
        })
    }

    fn wants_payload(&self) -> bool {
        false
    }
}
