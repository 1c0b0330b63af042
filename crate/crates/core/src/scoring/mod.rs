//! Answer matching, rates with confidence intervals, ablation interaction and the composite reward.

mod answer;
mod reward;
mod stats;
mod summary;

use thiserror::Error;

pub use answer::{
    extract_answer, match_answer, normalize_text, similarity, token_set, AnswerMethod, MatchResult, DEFAULT_THRESHOLD,
};
pub use reward::{composite_reward, RewardInputs, RewardWeights};
pub use stats::{wilson_interval, Z_95};
pub use summary::{
    aggregate, interaction_effect, Condition, ConditionSummary, EvalSummary, InteractionGrid, RecordMetrics,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScoringError {
    #[error("no samples to summarize")]
    EmptySample,
    #[error("{successes} successes out of {n} trials")]
    SuccessesExceedTrials { successes: u64, n: u64 },
    #[error("{component} score {value} is outside the 1-5 scale")]
    ScaleOutOfRange { component: &'static str, value: f64 },
    #[error("interaction grid is missing a cell")]
    MissingCell,
}
