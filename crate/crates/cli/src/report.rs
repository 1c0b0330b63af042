//! The JSON report written by `evaluate` and read back by `report`.

use std::fmt::Write as _;

use nyaya_core::logic::SemanticSource;
use nyaya_core::parser::{FailureCode, ParseFailure, ParsedDocument};
use nyaya_core::scoring::{aggregate, Condition, EvalSummary, RecordMetrics, ScoringError};
use nyaya_harness::{EvalConfig, EvalRecord, TierOutcome, TierStatus};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::evaluate::Evaluated;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("report is not valid JSON for schema {SCHEMA_VERSION}: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported schema_version {0} (expected {SCHEMA_VERSION})")]
    Schema(u32),
    #[error("embedded summary does not match the rows: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Scoring(#[from] ScoringError),
}

/// Phase coverage as shown in per-trace summary tables.
pub fn format_cell(parsed: &ParsedDocument) -> String {
    let present = parsed.trace.phase_presence.iter().filter(|p| **p).count();
    if present == 0 {
        "None".into()
    } else if parsed.failures.iter().any(|f| matches!(f.code, FailureCode::InvalidDoubtType { .. })) {
        "Invalid".into()
    } else if present == 6 && parsed.parse_ok() {
        "Complete (6/6)".into()
    } else {
        format!("Partial ({present}/6)")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub id: String,
    pub parse_ok: bool,
    pub valid: bool,
    pub violations: Vec<String>,
    pub failures: Vec<ParseFailure>,
    pub format: String,
    pub extracted_answer: String,
    pub similarity: f64,
    /// `None` when no answer could be determined.
    pub semantic: Option<bool>,
    pub semantic_source: SemanticSource,
    pub semantic_match: bool,
    pub tiers: Vec<TierOutcome>,
    pub verdict: Option<String>,
    pub reward: f64,
    pub output_length: usize,
    pub condition: Condition,
    pub attempts: u32,
    pub errors: Vec<String>,
}

impl ReportRow {
    pub fn from_record(r: &EvalRecord, attempts: u32, errors: Vec<String>) -> Self {
        let m = r.metrics();
        ReportRow {
            id: r.id.clone(),
            parse_ok: m.parse_ok,
            valid: m.valid,
            violations: r.report.violations.iter().map(|v| v.code.key().to_string()).collect(),
            failures: m.failures,
            format: format_cell(&r.parsed),
            extracted_answer: r.semantic.answer.extracted_answer.clone(),
            similarity: r.semantic.answer.similarity,
            semantic: r.semantic.verdict,
            semantic_source: r.semantic.source,
            semantic_match: m.semantic_match,
            tiers: r.outcomes.clone(),
            verdict: r.verdict.as_ref().map(|v| v.to_string()),
            reward: r.reward,
            output_length: m.output_length,
            condition: r.condition,
            attempts,
            errors,
        }
    }

    pub fn metrics(&self) -> RecordMetrics {
        RecordMetrics {
            id: self.id.clone(),
            parse_ok: self.parse_ok,
            valid: self.valid,
            semantic_match: self.semantic_match,
            output_length: self.output_length,
            failures: self.failures.clone(),
            condition: Some(self.condition),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema_version: u32,
    pub tool_version: String,
    pub config: EvalConfig,
    pub rows: Vec<ReportRow>,
    pub summary: EvalSummary,
}

impl ReportDocument {
    pub fn build(config: &EvalConfig, results: &[Evaluated]) -> Result<Self, ReportError> {
        let mut rows: Vec<ReportRow> = results
            .iter()
            .map(|e| ReportRow::from_record(&e.record, e.attempts, e.errors.iter().map(|x| x.to_string()).collect()))
            .collect();
        rows.sort_by(|a, b| a.id.cmp(&b.id));
        let metrics: Vec<RecordMetrics> = rows.iter().map(ReportRow::metrics).collect();
        Ok(ReportDocument {
            schema_version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config: config.clone(),
            summary: aggregate(&metrics)?,
            rows,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// Parse, check the schema version, and recompute the summary from the rows.
    pub fn load(text: &str) -> Result<Self, ReportError> {
        let raw: serde_json::Value = serde_json::from_str(text)?;
        let version = raw.get("schema_version").and_then(|v| v.as_u64()).unwrap_or(0) as u32;
        if version != SCHEMA_VERSION {
            return Err(ReportError::Schema(version));
        }
        let doc: ReportDocument = serde_json::from_value(raw)?;
        doc.check_consistency()?;
        Ok(doc)
    }

    pub fn check_consistency(&self) -> Result<(), ReportError> {
        let metrics: Vec<RecordMetrics> = self.rows.iter().map(ReportRow::metrics).collect();
        let recomputed = aggregate(&metrics)?;
        if recomputed != self.summary {
            let field = if recomputed.n != self.summary.n {
                "n"
            } else if recomputed.format_count != self.summary.format_count {
                "format_count"
            } else if recomputed.semantic_count != self.summary.semantic_count {
                "semantic_count"
            } else {
                "derived statistics"
            };
            return Err(ReportError::Inconsistent(field.into()));
        }
        Ok(())
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:<14} {:<5} {:<5} {:<8} {:>5} {:<15} {:>6}  tiers",
            "id", "parse", "valid", "semantic", "sim", "format", "reward"
        );
        for r in &self.rows {
            let semantic = match r.semantic {
                Some(true) => "yes",
                Some(false) => "no",
                None => "unknown",
            };
            let tiers: Vec<String> =
                r.tiers.iter().map(|t| format!("{}:{}", t.tier.number(), status_word(t.status))).collect();
            let _ = writeln!(
                s,
                "{:<14} {:<5} {:<5} {:<8} {:>5.2} {:<15} {:>6.3}  {}",
                r.id,
                yes_no(r.parse_ok),
                yes_no(r.valid),
                semantic,
                r.similarity,
                r.format,
                r.reward,
                tiers.join(" ")
            );
        }
        let m = &self.summary;
        let _ = writeln!(s);
        let _ = writeln!(s, "n = {}", m.n);
        let _ = writeln!(
            s,
            "format rate   {:.2} ({}/{})  95% CI ({:.3}, {:.3})",
            m.format_rate, m.format_count, m.n, m.ci_format.0, m.ci_format.1
        );
        let _ = writeln!(
            s,
            "semantic rate {:.2} ({}/{})  95% CI ({:.3}, {:.3})",
            m.semantic_rate, m.semantic_count, m.n, m.ci_semantic.0, m.ci_semantic.1
        );
        let _ = writeln!(s, "parse rate    {:.2} ({}/{})", m.parse_rate, m.parse_count, m.n);
        if let Some(v) = m.semantic_over_valid {
            let _ = writeln!(s, "semantic among valid {v:.2}");
        }
        let _ = writeln!(s, "average output length {:.1} tokens", m.avg_output_length);
        let failures: Vec<String> = m.failure_histogram.labels.iter().map(|(k, v)| format!("{k} {v}")).collect();
        if !failures.is_empty() {
            let _ = writeln!(s, "failures: {}", failures.join(", "));
        }
        s
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn status_word(s: TierStatus) -> &'static str {
    match s {
        TierStatus::Passed => "pass",
        TierStatus::Failed => "fail",
        TierStatus::Skipped => "skip",
        TierStatus::Error => "error",
    }
}
