//! Tier-2 rubric: nine 0-10 dimension scores read from a strict fenced block.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::client::{ClientError, GenerationRequest, ModelClient};

pub const DIMENSIONS: [&str; 9] = [
    "samshaya_appropriateness",
    "pratyaksha_validity",
    "anumana_correctness",
    "upamana_relevance",
    "shabda_correctness",
    "pancha_avayava_quality",
    "tarka_meaningfulness",
    "hetvabhasa_thoroughness",
    "nirnaya_definitiveness",
];

pub const MAX_TOTAL: u32 = 90;
pub const AUTO_ACCEPT_MIN: u32 = 77;
pub const MANUAL_REVIEW_MIN: u32 = 63;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct JudgeScores {
    pub samshaya_appropriateness: u8,
    pub pratyaksha_validity: u8,
    pub anumana_correctness: u8,
    pub upamana_relevance: u8,
    pub shabda_correctness: u8,
    pub pancha_avayava_quality: u8,
    pub tarka_meaningfulness: u8,
    pub hetvabhasa_thoroughness: u8,
    pub nirnaya_definitiveness: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JudgeError {
    #[error("no ```judge block in judge output")]
    MissingBlock,
    #[error("line {0:?} is not `name: score`")]
    BadLine(String),
    #[error("unknown dimension `{0}`")]
    UnknownDimension(String),
    #[error("dimension `{0}` given twice")]
    Duplicate(String),
    #[error("dimension `{0}` missing")]
    Missing(&'static str),
    #[error("score `{value}` for `{name}` is not an integer from 0 to 10")]
    BadScore { name: String, value: String },
    #[error(transparent)]
    Client(#[from] ClientError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JudgeDecision {
    AutoAccept,
    ManualReview,
    Reject,
}

impl JudgeScores {
    pub fn from_array(s: [u8; 9]) -> Result<Self, JudgeError> {
        if let Some(i) = s.iter().position(|v| *v > 10) {
            return Err(JudgeError::BadScore { name: DIMENSIONS[i].to_string(), value: s[i].to_string() });
        }
        Ok(JudgeScores {
            samshaya_appropriateness: s[0],
            pratyaksha_validity: s[1],
            anumana_correctness: s[2],
            upamana_relevance: s[3],
            shabda_correctness: s[4],
            pancha_avayava_quality: s[5],
            tarka_meaningfulness: s[6],
            hetvabhasa_thoroughness: s[7],
            nirnaya_definitiveness: s[8],
        })
    }

    pub fn as_array(&self) -> [u8; 9] {
        [
            self.samshaya_appropriateness,
            self.pratyaksha_validity,
            self.anumana_correctness,
            self.upamana_relevance,
            self.shabda_correctness,
            self.pancha_avayava_quality,
            self.tarka_meaningfulness,
            self.hetvabhasa_thoroughness,
            self.nirnaya_definitiveness,
        ]
    }

    pub fn total(&self) -> u32 {
        self.as_array().iter().map(|v| *v as u32).sum()
    }

    pub fn normalized(&self) -> f64 {
        self.total() as f64 / MAX_TOTAL as f64
    }

    /// Parse the first ```` ```judge ```` fenced block: exactly the nine `name: integer` lines.
    pub fn parse_block(text: &str) -> Result<Self, JudgeError> {
        let text = text.replace("\r\n", "\n");
        let mut lines = text.lines();
        lines.find(|l| l.trim() == "```judge").ok_or(JudgeError::MissingBlock)?;
        let mut seen: BTreeMap<&str, u8> = BTreeMap::new();
        let mut closed = false;
        for line in lines {
            let t = line.trim();
            if t == "```" {
                closed = true;
                break;
            }
            if t.is_empty() {
                continue;
            }
            let (name, value) = t.split_once(':').ok_or_else(|| JudgeError::BadLine(t.to_string()))?;
            let name = name.trim();
            let dim = DIMENSIONS
                .iter()
                .find(|d| **d == name)
                .ok_or_else(|| JudgeError::UnknownDimension(name.to_string()))?;
            let value = value.trim();
            let score: u8 = value
                .parse()
                .ok()
                .filter(|v| *v <= 10 && value.chars().all(|c| c.is_ascii_digit()))
                .ok_or_else(|| JudgeError::BadScore { name: name.to_string(), value: value.to_string() })?;
            if seen.insert(dim, score).is_some() {
                return Err(JudgeError::Duplicate(name.to_string()));
            }
        }
        if !closed {
            return Err(JudgeError::MissingBlock);
        }
        let mut arr = [0u8; 9];
        for (i, d) in DIMENSIONS.iter().enumerate() {
            arr[i] = *seen.get(d).ok_or(JudgeError::Missing(d))?;
        }
        JudgeScores::from_array(arr)
    }

    pub fn to_block(&self) -> String {
        let mut s = String::from("```judge\n");
        for (d, v) in DIMENSIONS.iter().zip(self.as_array()) {
            s.push_str(&format!("{d}: {v}\n"));
        }
        s.push_str("```\n");
        s
    }
}

/// Integer bands: 77 and up accepts, 63 to 76 goes to review.
pub fn judge_decision(scores: &JudgeScores) -> JudgeDecision {
    match scores.total() {
        t if t >= AUTO_ACCEPT_MIN => JudgeDecision::AutoAccept,
        t if t >= MANUAL_REVIEW_MIN => JudgeDecision::ManualReview,
        _ => JudgeDecision::Reject,
    }
}

pub trait JudgeClient: Send + Sync {
    fn score(&self, id: &str, trace: &str) -> Result<JudgeScores, JudgeError>;
}

pub const JUDGE_SYSTEM_PROMPT: &str = "You grade Nyaya reasoning traces. Score each dimension from 0 to 10 and reply with a single ```judge block of `dimension: score` lines.";

/// Judge backed by any text model that answers with a judge block.
pub struct ModelJudge<C> {
    pub client: C,
}

impl<C: ModelClient> JudgeClient for ModelJudge<C> {
    fn score(&self, id: &str, trace: &str) -> Result<JudgeScores, JudgeError> {
        let mut user = String::from("Dimensions:\n");
        for d in DIMENSIONS {
            user.push_str(&format!("- {d}\n"));
        }
        user.push_str("\nTrace:\n");
        user.push_str(trace);
        let req =
            GenerationRequest { system: JUDGE_SYSTEM_PROMPT.to_string(), user, temperature: 0.0, max_new_tokens: None };
        JudgeScores::parse_block(&self.client.generate(id, &req)?)
    }
}
