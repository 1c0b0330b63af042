use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::stats::{wilson_interval, Z_95};
use super::ScoringError;
use crate::parser::{classify_failures, ParseFailure, ReportingMode, Taxonomy};

/// Ablation tags: format prompting on/off and decoding temperature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub format_prompting: bool,
    pub temperature: f64,
}

/// What [`aggregate`] needs from one evaluated example.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordMetrics {
    pub id: String,
    pub parse_ok: bool,
    pub valid: bool,
    pub semantic_match: bool,
    /// Whitespace tokens; approximate.
    pub output_length: usize,
    pub failures: Vec<ParseFailure>,
    pub condition: Option<Condition>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionSummary {
    pub format_prompting: bool,
    pub temperature: f64,
    pub n: usize,
    pub format_rate: f64,
    pub semantic_rate: f64,
    pub avg_output_length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalSummary {
    pub n: usize,
    pub format_count: usize,
    pub semantic_count: usize,
    pub parse_count: usize,
    pub format_rate: f64,
    pub semantic_rate: f64,
    pub parse_rate: f64,
    pub ci_format: (f64, f64),
    pub ci_semantic: (f64, f64),
    pub avg_output_length: f64,
    /// Primary-mode parse-error histogram.
    pub failure_histogram: Taxonomy,
    /// Semantic matches among format-valid records; `None` when nothing was valid.
    pub semantic_over_valid: Option<f64>,
    pub per_condition: Vec<ConditionSummary>,
    pub interaction: Option<f64>,
}

/// A 2x2 ablation grid of rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InteractionGrid {
    pub on_lo: f64,
    pub on_hi: f64,
    pub off_lo: f64,
    pub off_hi: f64,
}

impl InteractionGrid {
    pub fn new(on_lo: f64, on_hi: f64, off_lo: f64, off_hi: f64) -> Self {
        InteractionGrid { on_lo, on_hi, off_lo, off_hi }
    }

    /// Build from condition rows; both temperatures must exist for both prompting modes.
    pub fn from_conditions(
        rows: &[ConditionSummary],
        rate: impl Fn(&ConditionSummary) -> f64,
    ) -> Result<Self, ScoringError> {
        let mut temps: Vec<f64> = rows.iter().map(|r| r.temperature).collect();
        temps.sort_by(f64::total_cmp);
        temps.dedup();
        if temps.len() != 2 {
            return Err(ScoringError::MissingCell);
        }
        let cell = |fmt: bool, t: f64| {
            rows.iter()
                .find(|r| r.format_prompting == fmt && r.temperature == t)
                .map(&rate)
                .ok_or(ScoringError::MissingCell)
        };
        Ok(InteractionGrid {
            on_lo: cell(true, temps[0])?,
            on_hi: cell(true, temps[1])?,
            off_lo: cell(false, temps[0])?,
            off_hi: cell(false, temps[1])?,
        })
    }
}

/// `(on_hi - on_lo) - (off_hi - off_lo)`, grouped to keep additive grids at exactly zero.
pub fn interaction_effect(g: &InteractionGrid) -> f64 {
    (g.on_hi + g.off_lo) - (g.on_lo + g.off_hi)
}

fn rate(count: usize, n: usize) -> f64 {
    count as f64 / n as f64
}

pub fn aggregate(records: &[RecordMetrics]) -> Result<EvalSummary, ScoringError> {
    if records.is_empty() {
        return Err(ScoringError::EmptySample);
    }
    let mut sorted: Vec<&RecordMetrics> = records.iter().collect();
    sorted.sort_by(|a, b| a.id.cmp(&b.id));

    let n = sorted.len();
    let format_count = sorted.iter().filter(|r| r.valid).count();
    let semantic_count = sorted.iter().filter(|r| r.semantic_match).count();
    let parse_count = sorted.iter().filter(|r| r.parse_ok).count();
    let total_len: u64 = sorted.iter().map(|r| r.output_length as u64).sum();
    let valid_semantic = sorted.iter().filter(|r| r.valid && r.semantic_match).count();

    let failure_histogram = classify_failures(sorted.iter().map(|r| r.failures.as_slice()), ReportingMode::Primary);

    let mut groups: BTreeMap<(bool, u64), Vec<&RecordMetrics>> = BTreeMap::new();
    for r in &sorted {
        if let Some(c) = r.condition {
            groups.entry((c.format_prompting, c.temperature.to_bits())).or_default().push(r);
        }
    }
    let per_condition: Vec<ConditionSummary> = groups
        .into_iter()
        .map(|((format_prompting, bits), rs)| ConditionSummary {
            format_prompting,
            temperature: f64::from_bits(bits),
            n: rs.len(),
            format_rate: rate(rs.iter().filter(|r| r.valid).count(), rs.len()),
            semantic_rate: rate(rs.iter().filter(|r| r.semantic_match).count(), rs.len()),
            avg_output_length: rs.iter().map(|r| r.output_length as u64).sum::<u64>() as f64 / rs.len() as f64,
        })
        .collect();
    let interaction =
        InteractionGrid::from_conditions(&per_condition, |c| c.semantic_rate).ok().map(|g| interaction_effect(&g));

    Ok(EvalSummary {
        n,
        format_count,
        semantic_count,
        parse_count,
        format_rate: rate(format_count, n),
        semantic_rate: rate(semantic_count, n),
        parse_rate: rate(parse_count, n),
        ci_format: wilson_interval(format_count as u64, n as u64, Z_95)?,
        ci_semantic: wilson_interval(semantic_count as u64, n as u64, Z_95)?,
        avg_output_length: total_len as f64 / n as f64,
        failure_histogram,
        semantic_over_valid: (format_count > 0).then(|| rate(valid_semantic, format_count)),
        per_condition,
        interaction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rec(id: usize, valid: bool, semantic: bool, cond: Option<Condition>) -> RecordMetrics {
        RecordMetrics {
            id: format!("r{id:03}"),
            parse_ok: valid,
            valid,
            semantic_match: semantic,
            output_length: id * 7 % 13,
            failures: vec![],
            condition: cond,
        }
    }

    #[test]
    fn four_of_ten() {
        let rs: Vec<_> = (0..10).map(|i| rec(i, i < 4, true, None)).collect();
        let s = aggregate(&rs).unwrap();
        assert_eq!(s.format_rate, 0.4);
        assert_eq!(s.semantic_rate, 1.0);
        assert!((s.ci_format.0 - 0.168).abs() < 1e-3 && (s.ci_format.1 - 0.687).abs() < 1e-3);
        assert_eq!(s.interaction, None);
    }

    #[test]
    fn single_and_empty() {
        let s = aggregate(&[rec(1, false, true, None)]).unwrap();
        assert_eq!((s.format_rate, s.semantic_rate), (0.0, 1.0));
        assert!(aggregate(&[]).is_err());
    }

    #[test]
    fn published_grids() {
        assert!((interaction_effect(&InteractionGrid::new(0.30, 0.10, 0.00, 0.10)) + 0.300).abs() < 1e-12);
        assert_eq!(interaction_effect(&InteractionGrid::new(0.20, 0.30, 0.10, 0.20)), 0.0);
        assert_eq!(interaction_effect(&InteractionGrid::new(0.5, 0.5, 0.5, 0.5)), 0.0);
    }

    #[test]
    fn missing_cell_is_rejected() {
        let row = |f, t| ConditionSummary {
            format_prompting: f,
            temperature: t,
            n: 1,
            format_rate: 0.0,
            semantic_rate: 0.0,
            avg_output_length: 0.0,
        };
        let rows = vec![row(true, 0.0), row(true, 0.7), row(false, 0.0)];
        assert!(matches!(InteractionGrid::from_conditions(&rows, |c| c.semantic_rate), Err(ScoringError::MissingCell)));
    }

    #[test]
    fn grid_from_records() {
        let mut rs = Vec::new();
        // semantic hits per cell out of 10: on/0.0 -> 3, on/0.7 -> 1, off/0.0 -> 0, off/0.7 -> 1
        for (f, t, hits) in [(true, 0.0, 3), (true, 0.7, 1), (false, 0.0, 0), (false, 0.7, 1)] {
            for i in 0..10 {
                let id = rs.len();
                rs.push(rec(id, false, i < hits, Some(Condition { format_prompting: f, temperature: t })));
            }
        }
        let s = aggregate(&rs).unwrap();
        assert_eq!(s.per_condition.len(), 4);
        assert!((s.interaction.unwrap() + 0.3).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn additive_grids_have_no_interaction(lo in 0.0f64..0.5, hi in 0.0f64..0.5, c in 0.0f64..0.5) {
            let g = InteractionGrid::new(lo + c, hi + c, lo, hi);
            prop_assert!(interaction_effect(&g).abs() < 1e-12);
        }

        #[test]
        fn order_independent(flags in proptest::collection::vec((any::<bool>(), any::<bool>()), 1..30), seed in any::<u64>()) {
            let rs: Vec<_> = flags.iter().enumerate().map(|(i, (v, s))| rec(i, *v, *s, None)).collect();
            let mut shuffled = rs.clone();
            let len = shuffled.len();
            shuffled.rotate_left((seed as usize) % len);
            shuffled.reverse();
            prop_assert_eq!(aggregate(&rs).unwrap(), aggregate(&shuffled).unwrap());
        }
    }
}
