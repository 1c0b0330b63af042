#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};

use nyaya_core::model::Phase;
use nyaya_core::parser::FailureCode;
use nyaya_core::validator::{validate_text, ValidationConfig, ViolationCode};

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn read(rel: &str) -> String {
    fs::read_to_string(fixtures().join(rel)).unwrap_or_else(|e| panic!("{rel}: {e}"))
}

/// Every trace-bearing fixture, as (name, text).
pub fn all_traces() -> Vec<(String, String)> {
    let mut out = Vec::new();
    for dir in ["worked/outputs", "stage0", "stage1", "corpus"] {
        let mut paths: Vec<PathBuf> = fs::read_dir(fixtures().join(dir))
            .unwrap()
            .map(|e| e.unwrap().path())
            .filter(|p| p.extension().is_some_and(|x| x == "md"))
            .collect();
        paths.sort();
        for p in paths {
            let name = format!("{dir}/{}", p.file_name().unwrap().to_string_lossy());
            out.push((name, fs::read_to_string(&p).unwrap()));
        }
    }
    out
}

pub fn valid_traces() -> Vec<(String, String)> {
    let cfg = ValidationConfig::default();
    all_traces().into_iter().filter(|(_, t)| validate_text(t, &cfg).1.valid).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MutationKind {
    SectionDeletion,
    SectionSwap,
    EnumCorruption,
    MemberDeletion,
}

pub const KINDS: [MutationKind; 4] = [
    MutationKind::SectionDeletion,
    MutationKind::SectionSwap,
    MutationKind::EnumCorruption,
    MutationKind::MemberDeletion,
];

#[derive(Debug, Clone)]
pub struct Mutation {
    pub kind: MutationKind,
    pub text: String,
    /// The only violation key the edit should produce.
    pub expected: &'static str,
    pub missing_phase: Option<Phase>,
    pub note: String,
}

/// Byte ranges of the first header of each phase, in document order.
fn phase_spans(text: &str) -> Vec<(Phase, usize, usize)> {
    let mut starts: Vec<(Phase, usize)> = Vec::new();
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        if let Some(rest) = line.strip_prefix("## ") {
            let name = rest.split('(').next().unwrap().trim();
            if let Some(p) = Phase::ALL.into_iter().find(|p| p.name().eq_ignore_ascii_case(name)) {
                if !starts.iter().any(|(q, _)| *q == p) {
                    starts.push((p, offset));
                }
            }
        }
        offset += line.len();
    }
    let mut spans = Vec::new();
    for (i, (p, s)) in starts.iter().enumerate() {
        let e = starts.get(i + 1).map_or(text.len(), |(_, n)| *n);
        spans.push((*p, *s, e));
    }
    spans
}

fn with_newline(s: &str) -> String {
    if s.ends_with('\n') {
        s.to_string()
    } else {
        format!("{s}\n")
    }
}

const MEMBERS: [&str; 5] = ["Pratijna", "Hetu", "Udaharana", "Upanaya", "Nigamana"];

/// One single-edit mutation of `text`, chosen by `pick`. `None` when the kind does not apply.
pub fn mutate(text: &str, kind: MutationKind, pick: u64) -> Option<Mutation> {
    let spans = phase_spans(text);
    match kind {
        MutationKind::SectionDeletion => {
            let (phase, s, e) = spans[(pick % spans.len() as u64) as usize];
            let out = format!("{}{}", &text[..s], &text[e..]);
            Some(Mutation {
                kind,
                text: out,
                expected: "missing_section",
                missing_phase: Some(phase),
                note: format!("delete {phase}"),
            })
        }
        MutationKind::SectionSwap => {
            let i = (pick % (spans.len() as u64 - 1)) as usize;
            let (a, s1, e1) = spans[i];
            let (b, s2, e2) = spans[i + 1];
            let out =
                format!("{}{}{}{}", &text[..s1], with_newline(&text[s2..e2]), with_newline(&text[s1..e1]), &text[e2..]);
            Some(Mutation {
                kind,
                text: out,
                expected: "section_order_violation",
                missing_phase: None,
                note: format!("swap {a} and {b}"),
            })
        }
        MutationKind::EnumCorruption => {
            if pick.is_multiple_of(2) {
                let line = text.lines().find(|l| l.starts_with("**Doubt Type**"))?;
                let bad =
                    ["Pramana Dharma", "Confusion", "Vipratipatti Samshaya", "Uncertainty"][(pick / 2 % 4) as usize];
                let out = text.replacen(line, &format!("**Doubt Type**: {bad}"), 1);
                Some(Mutation {
                    kind,
                    text: out,
                    expected: "invalid_doubt_type",
                    missing_phase: None,
                    note: format!("doubt type {bad}"),
                })
            } else {
                let checks: Vec<&str> = text.lines().filter(|l| l.starts_with("Check for ")).collect();
                if checks.is_empty() {
                    return None;
                }
                let line = checks[(pick / 2 % checks.len() as u64) as usize];
                let out = text.replacen(line, "Check for Anyathasiddhi: No", 1);
                Some(Mutation {
                    kind,
                    text: out,
                    expected: "hetvabhasa_incomplete",
                    missing_phase: None,
                    note: format!("corrupt `{line}`"),
                })
            }
        }
        MutationKind::MemberDeletion => {
            let (_, s, e) = *spans.iter().find(|(p, _, _)| *p == Phase::PanchaAvayava)?;
            let section = &text[s..e];
            let member = MEMBERS[(pick % 5) as usize];
            let lines: Vec<&str> = section.split_inclusive('\n').collect();
            let candidates: Vec<usize> = lines
                .iter()
                .enumerate()
                .filter(|(_, l)| l.starts_with(&format!("**{member}")))
                .map(|(i, _)| i)
                .collect();
            let start = candidates[(pick / 5 % candidates.len() as u64) as usize];
            let mut end = start + 1;
            while end < lines.len() {
                let l = lines[end].trim();
                if l.is_empty() || l.starts_with("**") || l.starts_with('#') || l.starts_with("---") {
                    break;
                }
                end += 1;
            }
            let kept: String = lines[..start].concat() + &lines[end..].concat();
            let out = format!("{}{}{}", &text[..s], kept, &text[e..]);
            Some(Mutation {
                kind,
                text: out,
                expected: "incomplete_syllogism",
                missing_phase: None,
                note: format!("delete {member}"),
            })
        }
    }
}

/// Violation keys for `text` under the default configuration, plus the full report codes.
pub fn violation_keys(text: &str) -> (bool, Vec<&'static str>, Vec<ViolationCode>) {
    let (_, report) = validate_text(text, &ValidationConfig::default());
    let keys = report.violations.iter().map(|v| v.code.key()).collect();
    let codes = report.violations.iter().map(|v| v.code.clone()).collect();
    (report.valid, keys, codes)
}

/// Checks one mutation: exactly the targeted code, and never valid.
pub fn check_mutation(m: &Mutation) -> Result<(), String> {
    let (valid, keys, codes) = violation_keys(&m.text);
    if valid {
        return Err(format!("{}: spurious pass", m.note));
    }
    let mut uniq = keys.clone();
    uniq.dedup();
    if uniq != [m.expected] {
        return Err(format!("{}: expected only {}, got {:?}", m.note, m.expected, keys));
    }
    if let Some(phase) = m.missing_phase {
        let want = ViolationCode::Parse(FailureCode::MissingSection { phase });
        if codes != [want] {
            return Err(format!("{}: wrong section reported: {:?}", m.note, codes));
        }
    }
    Ok(())
}

/// Writes `n` distinct corpus files derived from a fixture, under file names that sort
/// differently from their ids when `scramble` is set.
pub fn synth_corpus(dir: &Path, n: usize, scramble: bool) {
    let base = fs::read_to_string(fixtures().join("corpus/pramana-001.md")).unwrap();
    let order: Vec<usize> = if scramble { (0..n).rev().collect() } else { (0..n).collect() };
    for i in order {
        let id = format!("gen-{i:03}");
        let text = base
            .replace("id: pramana-001", &format!("id: {id}"))
            .replace("Question: Who has which pet?", &format!("Question: Who has which pet? (variant {i})"));
        let name = if scramble { format!("{:03}-x.md", n - i) } else { format!("{id}.md") };
        fs::write(dir.join(name), text).unwrap();
    }
}
