//! Structural validation and phase-quality scoring.

use std::fmt;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::model::*;
use crate::parser::{missing_fields, parse_document, FailureCode, ParseOptions, ParsedDocument};
use crate::scoring::{similarity, token_set};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleMode {
    /// "wherever" followed by a clause.
    #[default]
    Lenient,
    /// Also a "there" consequent in the same sentence.
    Strict,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationConfig {
    pub fallacy_selector: FallacySelector,
    pub universal_rule: RuleMode,
    pub require_leading_samshaya: bool,
    pub corpus_mode: bool,
}

impl ValidationConfig {
    pub fn parse_options(&self) -> ParseOptions {
        ParseOptions { corpus_mode: self.corpus_mode, require_leading_samshaya: self.require_leading_samshaya }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "code", rename_all = "snake_case")]
pub enum SemanticCode {
    PramanaTypeMissing {
        kind: PramanaKind,
    },
    /// 1-based syllogism index.
    UdaharanaNoUniversalRule {
        index: usize,
    },
    HetvabhasaIncomplete {
        count: usize,
    },
    TarkaTautological,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ViolationCode {
    Parse(FailureCode),
    Semantic(SemanticCode),
}

impl ViolationCode {
    pub fn key(&self) -> &'static str {
        match self {
            ViolationCode::Parse(c) => c.key(),
            ViolationCode::Semantic(SemanticCode::PramanaTypeMissing { .. }) => "pramana_type_missing",
            ViolationCode::Semantic(SemanticCode::UdaharanaNoUniversalRule { .. }) => "udaharana_no_universal_rule",
            ViolationCode::Semantic(SemanticCode::HetvabhasaIncomplete { .. }) => "hetvabhasa_incomplete",
            ViolationCode::Semantic(SemanticCode::TarkaTautological) => "tarka_tautological",
        }
    }
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ViolationCode::Parse(c) => c.fmt(f),
            ViolationCode::Semantic(SemanticCode::PramanaTypeMissing { kind }) => {
                write!(f, "Pramana type missing: {kind}")
            }
            ViolationCode::Semantic(SemanticCode::UdaharanaNoUniversalRule { index }) => {
                write!(f, "Syllogism {index} Udaharana lacks a universal rule")
            }
            ViolationCode::Semantic(SemanticCode::HetvabhasaIncomplete { count }) => {
                write!(f, "Hetvabhasa checks {count} of 5 fallacies")
            }
            ViolationCode::Semantic(SemanticCode::TarkaTautological) => {
                f.write_str("Tarka restates the conclusion instead of testing it")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub code: ViolationCode,
    pub message: String,
}

impl Violation {
    fn new(code: ViolationCode) -> Self {
        let message = code.to_string();
        Violation { code, message }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub violations: Vec<Violation>,
    pub phase_bitmap: [bool; 6],
    pub syllogism_count: usize,
    pub quality_score: u8,
}

impl ValidationReport {
    pub fn codes(&self) -> Vec<&ViolationCode> {
        self.violations.iter().map(|v| &v.code).collect()
    }
}

static WHEREVER: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i)\bwherever\b\s+\w").unwrap());
static WHEREVER_THERE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)\bwherever\b\s+\w[^.!?;]*\bthere\b").unwrap());

pub fn check_universal_rule(udaharana: &str, mode: RuleMode) -> bool {
    match mode {
        RuleMode::Lenient => WHEREVER.is_match(udaharana),
        RuleMode::Strict => WHEREVER_THERE.is_match(udaharana),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TarkaVerdict {
    Meaningful,
    Tautological,
}

const NEGATION_CUES: [&str; 9] = ["not", "no", "cannot", "never", "neither", "nor", "opposite", "negation", "negate"];
const TAUTOLOGY_OVERLAP: f64 = 0.9;

fn has_negation_cue(text: &str) -> bool {
    let lower = text.to_lowercase();
    if lower.contains("n't") || lower.contains("n\u{2019}t") {
        return true;
    }
    let tokens: Vec<String> = crate::scoring::normalize_text(&lower).split(' ').map(str::to_string).collect();
    if tokens.iter().any(|t| NEGATION_CUES.contains(&t.as_str())) {
        return true;
    }
    let assume = tokens.iter().position(|t| t == "suppose" || t == "assume");
    assume.is_some_and(|i| tokens[i..].iter().any(|t| t == "false"))
}

/// A hypothesis with no negation that restates the conclusion tests nothing.
pub fn check_tarka_tautology(
    tarka: &TarkaPhase,
    nirnaya: Option<&NirnayaPhase>,
    syllogisms: &[Syllogism],
) -> TarkaVerdict {
    let Some(premise) = tarka.premise().filter(|p| !token_set(p).is_empty()) else {
        return TarkaVerdict::Meaningful;
    };
    if has_negation_cue(premise) {
        return TarkaVerdict::Meaningful;
    }
    let conclusions =
        [syllogisms.iter().rev().find_map(|s| s.nigamana.as_deref()), nirnaya.and_then(|n| n.final_answer.as_deref())];
    let restates = conclusions.into_iter().flatten().any(|c| similarity(premise, c) >= TAUTOLOGY_OVERLAP);
    if restates {
        TarkaVerdict::Tautological
    } else {
        TarkaVerdict::Meaningful
    }
}

/// Phase-quality score out of 10; 0 whenever a hard-fail rule fires.
pub fn quality_score(trace: &NyayaTrace, cfg: &ValidationConfig) -> u8 {
    if trace.samshaya.is_none() || trace.nirnaya.is_none() {
        return 0;
    }
    let Some(pramana) = &trace.pramana else { return 0 };
    if !PramanaKind::ALL.iter().all(|k| pramana.has_kind(*k)) {
        return 0;
    }
    if trace.pancha_avayava.as_ref().map_or(0, |p| p.complete_count()) < 2 {
        return 0;
    }
    let Some(tarka) = &trace.tarka else { return 0 };
    if check_tarka_tautology(tarka, trace.nirnaya.as_ref(), trace.syllogisms()) == TarkaVerdict::Tautological {
        return 0;
    }
    match trace.hetvabhasa.as_ref().map_or(0, |h| h.coverage(cfg.fallacy_selector)) {
        5.. => 10,
        3..=4 => 7,
        _ => 0,
    }
}

pub fn validate(parsed: &ParsedDocument, cfg: &ValidationConfig) -> ValidationReport {
    let mut codes: Vec<ViolationCode> = Vec::new();
    if cfg.corpus_mode && !parsed.failures.iter().any(|f| matches!(f.code, FailureCode::FrontmatterMissingField { .. }))
    {
        codes.extend(missing_fields(parsed.frontmatter.as_ref()).into_iter().map(|f| ViolationCode::Parse(f.code)));
    }
    if cfg.require_leading_samshaya
        && !parsed.trace.leading_text.is_empty()
        && !parsed.failures.iter().any(|f| f.code == FailureCode::UnexpectedLeadingText)
    {
        codes.push(ViolationCode::Parse(FailureCode::UnexpectedLeadingText));
    }
    codes.extend(parsed.failures.iter().map(|f| ViolationCode::Parse(f.code.clone())));

    let trace = &parsed.trace;
    if let Some(pramana) = &trace.pramana {
        for kind in PramanaKind::ALL {
            if !pramana.has_kind(kind) {
                codes.push(ViolationCode::Semantic(SemanticCode::PramanaTypeMissing { kind }));
            }
        }
    }
    for (i, s) in trace.syllogisms().iter().enumerate() {
        if let Some(u) = s.member(SyllogismMember::Udaharana) {
            if !check_universal_rule(u, cfg.universal_rule) {
                codes.push(ViolationCode::Semantic(SemanticCode::UdaharanaNoUniversalRule { index: i + 1 }));
            }
        }
    }
    if let Some(tarka) = &trace.tarka {
        if check_tarka_tautology(tarka, trace.nirnaya.as_ref(), trace.syllogisms()) == TarkaVerdict::Tautological {
            codes.push(ViolationCode::Semantic(SemanticCode::TarkaTautological));
        }
    }
    if let Some(h) = &trace.hetvabhasa {
        let count = h.coverage(cfg.fallacy_selector);
        if count < 5 {
            codes.push(ViolationCode::Semantic(SemanticCode::HetvabhasaIncomplete { count }));
        }
    }

    let violations: Vec<Violation> = codes.into_iter().map(Violation::new).collect();
    ValidationReport {
        valid: violations.is_empty(),
        violations,
        phase_bitmap: trace.phase_presence,
        syllogism_count: trace.syllogisms().len(),
        quality_score: quality_score(trace, cfg),
    }
}

/// Parse with the options implied by `cfg`, then validate.
pub fn validate_text(text: &str, cfg: &ValidationConfig) -> (ParsedDocument, ValidationReport) {
    let parsed = parse_document(text, &cfg.parse_options());
    let report = validate(&parsed, cfg);
    (parsed, report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn universal_rule_modes() {
        let d1 = "Wherever a person cannot have an item, they must have one of the remaining items.";
        assert!(check_universal_rule(d1, RuleMode::Lenient));
        assert!(!check_universal_rule(d1, RuleMode::Strict));
        let strict = "Wherever a direct constraint assigns entity E to position P, there E occupies P.";
        assert!(check_universal_rule(strict, RuleMode::Strict));
        for mode in [RuleMode::Lenient, RuleMode::Strict] {
            assert!(!check_universal_rule("For instance, John sits in seat 5.", mode));
        }
        assert!(!check_universal_rule("Wherever.", RuleMode::Lenient));
    }

    fn tarka(h: &str) -> TarkaPhase {
        TarkaPhase { hypothesis: Some(h.into()), analysis: Some("a".into()), ..Default::default() }
    }

    #[test]
    fn tautology_heuristic() {
        let syl = vec![Syllogism { nigamana: Some("Therefore, Bob has the dog.".into()), ..Default::default() }];
        assert_eq!(
            check_tarka_tautology(&tarka("Therefore, Bob has the dog."), None, &syl),
            TarkaVerdict::Tautological
        );
        assert_eq!(
            check_tarka_tautology(&tarka("Suppose Bob does not have the dog."), None, &syl),
            TarkaVerdict::Meaningful
        );
        assert_eq!(
            check_tarka_tautology(&tarka("Assume the opposite of the conclusion"), None, &syl),
            TarkaVerdict::Meaningful
        );
        assert_eq!(
            check_tarka_tautology(&tarka("Suppose Bob's claim is false, Bob has the dog"), None, &syl),
            TarkaVerdict::Meaningful
        );
        assert_eq!(check_tarka_tautology(&TarkaPhase::default(), None, &syl), TarkaVerdict::Meaningful);
    }

    #[test]
    fn negation_cues() {
        assert!(has_negation_cue("Suppose Alice doesn't have it"));
        assert!(has_negation_cue("neither one"));
        assert!(!has_negation_cue("Bob has the dog"));
    }
}
