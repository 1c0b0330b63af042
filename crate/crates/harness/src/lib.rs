//! Evaluation pipeline around the core parser, validator and logic oracle.

pub mod client;
pub mod config;
pub mod grammar;
pub mod judge;
pub mod prompt;
pub mod sampling;
pub mod tiers;

pub use client::{ClientError, GenerationRequest, HttpClient, ModelClient, PromptBundle, ReplayClient};
pub use config::{EvalConfig, Tier};
pub use grammar::{emit_grammar, grammar_accepts, Acceptor, GrammarError};
pub use judge::{judge_decision, JudgeClient, JudgeDecision, JudgeError, JudgeScores, ModelJudge};
pub use prompt::{assemble_prompt, SYSTEM_PROMPT};
pub use sampling::{rejection_sample, SampleResult};
pub use tiers::{cross_check, run_tiers, EvalRecord, Example, SolverCheck, TierOutcome, TierStatus};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Client(#[from] ClientError),
    #[error(transparent)]
    Grammar(#[from] GrammarError),
}
