use std::collections::BTreeSet;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::model::{is_hr, normalize_enum_token};
use crate::parser::{extract_fields, is_label_line, split_sections};

pub const DEFAULT_THRESHOLD: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnswerMethod {
    FinalAnswerLabel,
    NirnayaLabel,
    LastLine,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchResult {
    pub extracted_answer: String,
    pub method: AnswerMethod,
    pub exact: bool,
    pub normalized: bool,
    pub similarity: f64,
    pub semantic_match: bool,
}

static FINAL_ANSWER: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(?i)^\s*(?:[-*+]\s+)?\**\s*final\s+answer\s*(?:\([^)]*\))?\s*(?::\s*\**|\**\s*:)\s*(.*)$").unwrap()
});
static NIRNAYA: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)^\s*(?:[-*+]\s+)?\**\s*nirnaya\s*(?::\s*\**|\**\s*:)\s*(.*)$").unwrap());
static LEADING_LABEL: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^\s*(?:[-*+]\s+)?(?:\*\*[^*]{1,60}\*\*\s*:|\*\*[^*]{1,60}:\*\*)\s*").unwrap());

/// Pull the final answer out of raw model output.
pub fn extract_answer(output: &str) -> (String, AnswerMethod) {
    let text = output.replace("\r\n", "\n");
    let lines: Vec<&str> = text.lines().collect();

    if let Some(ans) = labelled(&lines, &FINAL_ANSWER) {
        return (ans, AnswerMethod::FinalAnswerLabel);
    }
    if let Some(ans) = labelled(&lines, &NIRNAYA) {
        return (ans, AnswerMethod::NirnayaLabel);
    }
    let split = split_sections(&text);
    let nirnaya_answer = split
        .sections
        .iter()
        .find(|s| normalize_enum_token(&s.name) == "nirnaya")
        .and_then(|s| extract_fields(&s.body).into_iter().find(|f| f.key == "answer" && !f.value.is_empty()));
    if let Some(f) = nirnaya_answer {
        return (f.value, AnswerMethod::NirnayaLabel);
    }

    let last = lines
        .iter()
        .rev()
        .map(|l| l.trim())
        .find(|l| !l.is_empty() && !l.starts_with('#') && !is_hr(l) && !l.starts_with("```"))
        .unwrap_or("");
    let stripped = LEADING_LABEL.replace(last, "");
    let cleaned = stripped.trim_start_matches(['-', '*', '+', ' ']).replace("**", "");
    (cleaned.trim().to_string(), AnswerMethod::LastLine)
}

fn labelled(lines: &[&str], re: &Regex) -> Option<String> {
    let start = lines.iter().position(|l| re.is_match(l))?;
    let mut value = re.captures(lines[start]).unwrap()[1].trim().to_string();
    for line in &lines[start + 1..] {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') || is_hr(t) || t.starts_with("```") || is_label_line(line) {
            break;
        }
        if !value.is_empty() {
            value.push(' ');
        }
        value.push_str(t);
    }
    Some(value.replace("**", "").trim().to_string())
}

/// Lowercase, map non-alphanumerics to spaces, collapse whitespace.
pub fn normalize_text(text: &str) -> String {
    text.to_lowercase()
        .chars()
        .map(|c| if c.is_alphanumeric() { c } else { ' ' })
        .collect::<String>()
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn token_set(text: &str) -> BTreeSet<String> {
    normalize_text(text).split(' ').filter(|t| !t.is_empty()).map(str::to_string).collect()
}

/// Ground-truth recall over normalized token sets.
pub fn similarity(answer: &str, ground_truth: &str) -> f64 {
    let truth = token_set(ground_truth);
    if truth.is_empty() {
        return 0.0;
    }
    let answer = token_set(answer);
    truth.intersection(&answer).count() as f64 / truth.len() as f64
}

pub fn match_answer(output: &str, ground_truth: &str, threshold: f64) -> MatchResult {
    let (extracted_answer, method) = extract_answer(output);
    let sim = similarity(&extracted_answer, ground_truth);
    MatchResult {
        exact: extracted_answer.trim() == ground_truth.trim(),
        normalized: normalize_text(&extracted_answer) == normalize_text(ground_truth),
        similarity: sim,
        semantic_match: sim >= threshold,
        extracted_answer,
        method,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn final_answer_label_spans_wrapped_lines() {
        let out = "## Nirnaya (Ascertainment)\n**Final Answer**: Alice has the fish, Bob has the cat, and Carol \nhas the dog.\n**Justification**: ok\n";
        let (a, m) = extract_answer(out);
        assert_eq!(a, "Alice has the fish, Bob has the cat, and Carol has the dog.");
        assert_eq!(m, AnswerMethod::FinalAnswerLabel);
    }

    #[test]
    fn plain_final_answer_label() {
        let (a, m) = extract_answer("stuff\n\nFinal answer: Carol has the fish.");
        assert_eq!((a.as_str(), m), ("Carol has the fish.", AnswerMethod::FinalAnswerLabel));
    }

    #[test]
    fn nirnaya_answer_label() {
        let (a, m) = extract_answer("## Nirnaya\n**Status**: Definitive\n**Answer**: A is true\n");
        assert_eq!((a.as_str(), m), ("A is true", AnswerMethod::NirnayaLabel));
        let (a, m) = extract_answer("Nirnaya: B is false");
        assert_eq!((a.as_str(), m), ("B is false", AnswerMethod::NirnayaLabel));
    }

    #[test]
    fn last_line_fallback() {
        assert_eq!(extract_answer("thinking\n\nTherefore X.\n"), ("Therefore X.".into(), AnswerMethod::LastLine));
        assert_eq!(
            extract_answer("**Analysis**: If S is not true, [output truncated]\n"),
            ("If S is not true, [output truncated]".into(), AnswerMethod::LastLine)
        );
        assert_eq!(extract_answer(""), (String::new(), AnswerMethod::LastLine));
    }

    #[test]
    fn recall_not_jaccard() {
        assert_eq!(similarity("a b c d", "a b"), 1.0);
        assert_eq!(similarity("a", "a b"), 0.5);
        assert_eq!(similarity("anything", ""), 0.0);
        assert_eq!(similarity("x", "..."), 0.0);
    }

    #[test]
    fn threshold_is_inclusive() {
        let m = match_answer("Final Answer: a b c d e f g h", "a b c d e f g h i j", 0.8);
        assert_eq!(m.similarity, 0.8);
        assert!(m.semantic_match);
        assert!(!m.exact && !m.normalized);
    }

    proptest! {
        #[test]
        fn superset_answers_score_one(truth in "[a-z]{1,6}( [a-z]{1,6}){0,6}", extra in "[a-z ]{0,20}") {
            let answer = format!("{extra} {truth}");
            prop_assert_eq!(similarity(&answer, &truth), 1.0);
        }

        #[test]
        fn case_and_punctuation_invariant(a in "[a-zA-Z ]{0,30}", t in "[a-zA-Z ]{1,30}") {
            let base = similarity(&a, &t);
            prop_assert_eq!(similarity(&a.to_uppercase(), &t.to_lowercase()), base);
            prop_assert_eq!(similarity(&a.replace(' ', ", "), &t.replace(' ', "; ")), base);
        }

        #[test]
        fn similarity_is_bounded(a in "\\PC{0,40}", t in "\\PC{0,40}") {
            let s = similarity(&a, &t);
            prop_assert!((0.0..=1.0).contains(&s));
        }
    }
}
