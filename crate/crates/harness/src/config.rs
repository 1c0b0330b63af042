use std::path::PathBuf;
use std::time::Duration;

use nyaya_core::scoring::{Condition, DEFAULT_THRESHOLD};
use nyaya_core::validator::ValidationConfig;
use serde::{Deserialize, Serialize};

use crate::HarnessError;

/// One stage of the evaluation chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tier {
    Structural = 1,
    Judge = 2,
    GroundTruth = 3,
    Formal = 4,
}

impl Tier {
    pub const ALL: [Tier; 4] = [Tier::Structural, Tier::Judge, Tier::GroundTruth, Tier::Formal];

    pub fn number(self) -> u8 {
        self as u8
    }

    pub fn from_number(n: u8) -> Option<Tier> {
        Tier::ALL.into_iter().find(|t| t.number() == n)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub tiers: Vec<Tier>,
    /// `None` generates until the model stops.
    pub max_new_tokens: Option<u32>,
    pub temperature: f64,
    pub format_prompting: bool,
    /// Rejection-sampling budget.
    pub samples: u32,
    pub threshold: f64,
    pub validation: ValidationConfig,
    /// Cross-check Tier 4 with this SMT solver when set.
    pub solver: Option<PathBuf>,
    #[serde(with = "secs")]
    pub solver_timeout: Duration,
}

mod secs {
    use std::time::Duration;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_secs_f64())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        let v = f64::deserialize(d)?;
        Duration::try_from_secs_f64(v).map_err(serde::de::Error::custom)
    }
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            tiers: vec![Tier::Structural, Tier::GroundTruth],
            max_new_tokens: Some(256),
            temperature: 0.0,
            format_prompting: true,
            samples: 5,
            threshold: DEFAULT_THRESHOLD,
            validation: ValidationConfig::default(),
            solver: None,
            solver_timeout: nyaya_core::logic::DEFAULT_TIMEOUT,
        }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.tiers.is_empty() {
            return Err(HarnessError::Config("no tiers selected".into()));
        }
        if self.tiers.windows(2).any(|w| w[0] >= w[1]) {
            return Err(HarnessError::Config("tiers must be strictly ascending".into()));
        }
        if !self.temperature.is_finite() || self.temperature < 0.0 {
            return Err(HarnessError::Config(format!("temperature {} must be >= 0", self.temperature)));
        }
        if self.samples == 0 {
            return Err(HarnessError::Config("samples must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(HarnessError::Config(format!("threshold {} outside [0, 1]", self.threshold)));
        }
        Ok(())
    }

    pub fn condition(&self) -> Condition {
        Condition { format_prompting: self.format_prompting, temperature: self.temperature }
    }

    pub fn runs(&self, tier: Tier) -> bool {
        self.tiers.contains(&tier)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_valid() {
        EvalConfig::default().validate().unwrap();
    }

    #[test]
    fn rejects_bad_configs() {
        let bad = [
            EvalConfig { tiers: vec![], ..Default::default() },
            EvalConfig { tiers: vec![Tier::GroundTruth, Tier::Structural], ..Default::default() },
            EvalConfig { tiers: vec![Tier::Structural, Tier::Structural], ..Default::default() },
            EvalConfig { temperature: -0.1, ..Default::default() },
            EvalConfig { temperature: f64::NAN, ..Default::default() },
            EvalConfig { samples: 0, ..Default::default() },
        ];
        for c in bad {
            assert!(c.validate().is_err(), "{c:?}");
        }
    }

    #[test]
    fn json_round_trip() {
        let c = EvalConfig { solver_timeout: Duration::from_millis(2500), ..Default::default() };
        let back: EvalConfig = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }
}
