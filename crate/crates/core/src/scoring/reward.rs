use serde::{Deserialize, Serialize};

use super::ScoringError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RewardWeights {
    pub format: f64,
    pub semantic: f64,
    pub pramana: f64,
    pub tarka: f64,
    pub consistency: f64,
}

impl Default for RewardWeights {
    fn default() -> Self {
        RewardWeights { format: 0.3, semantic: 0.25, pramana: 0.2, tarka: 0.15, consistency: 0.1 }
    }
}

impl RewardWeights {
    pub fn sum(&self) -> f64 {
        self.format + self.semantic + self.pramana + self.tarka + self.consistency
    }
}

/// Inputs to the composite reward. `pramana` and `tarka` are on a 1 to 5 scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RewardInputs {
    pub format_ok: bool,
    pub semantic_ok: bool,
    pub pramana: f64,
    pub tarka: f64,
    pub consistent: bool,
}

fn unit_scale(name: &'static str, s: f64) -> Result<f64, ScoringError> {
    if !(1.0..=5.0).contains(&s) {
        return Err(ScoringError::ScaleOutOfRange { component: name, value: s });
    }
    Ok((s - 1.0) / 4.0)
}

fn bit(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

pub fn composite_reward(inputs: &RewardInputs, w: &RewardWeights) -> Result<f64, ScoringError> {
    let pramana = unit_scale("pramana", inputs.pramana)?;
    let tarka = unit_scale("tarka", inputs.tarka)?;
    Ok(w.format * bit(inputs.format_ok)
        + w.semantic * bit(inputs.semantic_ok)
        + w.pramana * pramana
        + w.tarka * tarka
        + w.consistency * bit(inputs.consistent))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(f: bool, s: bool, p: f64, t: f64, c: bool) -> f64 {
        let inputs = RewardInputs { format_ok: f, semantic_ok: s, pramana: p, tarka: t, consistent: c };
        composite_reward(&inputs, &RewardWeights::default()).unwrap()
    }

    #[test]
    fn weights_sum_to_one() {
        assert_eq!(RewardWeights::default().sum(), 1.0);
    }

    #[test]
    fn reference_cases() {
        assert_eq!(r(true, true, 5.0, 5.0, true), 1.0);
        assert!((r(false, true, 5.0, 5.0, true) - 0.70).abs() < 1e-12);
        assert!((r(true, false, 1.0, 1.0, false) - 0.30).abs() < 1e-12);
        assert_eq!(r(false, false, 1.0, 1.0, false), 0.0);
    }

    #[test]
    fn out_of_range_is_rejected() {
        let bad = RewardInputs { format_ok: true, semantic_ok: true, pramana: 0.5, tarka: 3.0, consistent: true };
        assert!(composite_reward(&bad, &RewardWeights::default()).is_err());
        let nan = RewardInputs { tarka: f64::NAN, pramana: 3.0, ..bad };
        assert!(composite_reward(&nan, &RewardWeights::default()).is_err());
    }

    proptest! {
        #[test]
        fn bounded_and_monotone(f: bool, s: bool, c: bool, p in 1.0f64..=5.0, t in 1.0f64..=5.0, dp in 0.0f64..=4.0) {
            let base = r(f, s, p, t, c);
            prop_assert!((0.0..=1.0 + 1e-12).contains(&base));
            prop_assert!(r(true, s, p, t, c) >= base);
            prop_assert!(r(f, true, p, t, c) >= base);
            prop_assert!(r(f, s, p, t, true) >= base);
            prop_assert!(r(f, s, (p + dp).min(5.0), t, c) >= base - 1e-15);
            prop_assert!(r(f, s, p, (t + dp).min(5.0), c) >= base - 1e-15);
        }
    }
}
