use std::collections::BTreeMap;

use regex::Regex;

use super::problem::*;

/// `\bName\b`, dropping the boundary where the name begins or ends with punctuation.
fn bounded(name: &str) -> String {
    let word = |c: Option<char>| c.is_some_and(|c| c.is_alphanumeric() || c == '_');
    let mut s = String::new();
    if word(name.chars().next()) {
        s.push_str(r"\b");
    }
    s.push_str(&regex::escape(name));
    if word(name.chars().last()) {
        s.push_str(r"\b");
    }
    s
}

fn alternation(names: &[String]) -> String {
    let mut sorted: Vec<&String> = names.iter().collect();
    // Longest first so "Ann" never shadows "Anna".
    sorted.sort_by_key(|n| std::cmp::Reverse(n.len()));
    let parts: Vec<String> = sorted.iter().map(|n| bounded(n)).collect();
    format!("(?:{})", parts.join("|"))
}

fn canonical<'a>(names: &'a [String], surface: &str) -> Option<&'a String> {
    names.iter().find(|n| n.eq_ignore_ascii_case(surface.trim()))
}

const VERBS: &str = r"(?:(?:must|will|would|should|can only|does|do)\s+)?(?:has|have|owns|own|gets|get|keeps|keep|holds|hold|takes|take|sits|sit|is seated|is placed|is|lives|live|goes|go)";
const PREP: &str = r"(?:(?:in|on|at)\s+)?";
const ARTICLE: &str = r"(?:(?:the|a|an)\s+)?";
const SLOT: &str = r"(?:(?:seat|position|place|spot|shelf|slot|house|room|rank|number)\s+)?";

/// Pull entity/value or variable/truth bindings out of answer prose. Unrecognised clauses are skipped.
pub fn parse_assignment(problem: &LogicProblem, text: &str) -> AssignmentAnswer {
    match problem {
        LogicProblem::Bijection(p) => AssignmentAnswer::Bijection(parse_bijection(p, text)),
        LogicProblem::Horn(h) => AssignmentAnswer::Horn(parse_horn(h, text)),
    }
}

fn parse_bijection(p: &BijectionProblem, text: &str) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    if p.entities.is_empty() {
        return out;
    }
    let ent = alternation(&p.entities);
    let val = alternation(&p.values);

    let chain = Regex::new(&format!(r"(?i){ent}(?:\s*>\s*{ent})+")).expect("chain pattern");
    for m in chain.find_iter(text) {
        for (rank, name) in m.as_str().split('>').enumerate() {
            if let (Some(e), Some(v)) = (canonical(&p.entities, name), p.values.get(rank)) {
                out.entry(e.clone()).or_insert_with(|| v.clone());
            }
        }
    }

    let binding = Regex::new(&format!(
        r"(?i)(?P<e>{ent})\s*(?:{VERBS}\s+{PREP}{ARTICLE}{SLOT}|[:=]\s*{ARTICLE}|(?:->|→)\s*)(?P<v>{val})"
    ))
    .expect("binding pattern");
    for c in binding.captures_iter(text) {
        if let (Some(e), Some(v)) = (canonical(&p.entities, &c["e"]), canonical(&p.values, &c["v"])) {
            out.entry(e.clone()).or_insert_with(|| v.clone());
        }
    }
    out
}

fn parse_horn(h: &HornProblem, text: &str) -> BTreeMap<String, bool> {
    let mut out = BTreeMap::new();
    if h.variables.is_empty() {
        return out;
    }
    let var = alternation(&h.variables);
    let re = Regex::new(&format!(r"(?i)(?P<v>{var})\s*(?:is\s+(?P<neg>not\s+)?|[:=]\s*)(?P<t>true|false)\b"))
        .expect("horn pattern");
    for c in re.captures_iter(text) {
        if let Some(v) = canonical(&h.variables, &c["v"]) {
            let t = c["t"].eq_ignore_ascii_case("true") != c.name("neg").is_some();
            out.entry(v.clone()).or_insert(t);
        }
    }
    out
}
