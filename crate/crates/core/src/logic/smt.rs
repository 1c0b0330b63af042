use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::problem::*;

/// The constraint script plus, when an answer was given, the two check scripts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmtScripts {
    pub base: String,
    /// Constraints plus the answer; sat when the answer is consistent.
    pub satisfies: Option<String>,
    /// Constraints plus the negated answer; unsat when the answer is forced.
    pub uniqueness: Option<String>,
}

/// Quoted SMT-LIB symbol. `|` and `\` are not allowed inside quotes.
fn sym(name: &str) -> String {
    let clean: String = name.chars().map(|c| if c == '|' || c == '\\' { '_' } else { c }).collect();
    format!("|{clean}|")
}

fn rank_sym(name: &str) -> String {
    sym(&format!("{name}#rank"))
}

fn conj(parts: &[String]) -> String {
    match parts.len() {
        0 => "true".to_string(),
        1 => parts[0].clone(),
        _ => format!("(and {})", parts.join(" ")),
    }
}

fn bijection_base(p: &BijectionProblem) -> String {
    let mut s = String::new();
    let n = p.values.len();
    s.push_str("(set-logic QF_LIA)\n");
    for (i, v) in p.values.iter().enumerate() {
        let _ = writeln!(s, "; {i} = {v}");
    }
    for e in &p.entities {
        let _ = writeln!(s, "(declare-const {} Int)", sym(e));
    }
    for e in &p.entities {
        let _ = writeln!(s, "(assert (and (<= 0 {0}) (< {0} {n})))", sym(e));
    }
    if p.entities.len() > 1 {
        let all: Vec<String> = p.entities.iter().map(|e| sym(e)).collect();
        let _ = writeln!(s, "(assert (distinct {}))", all.join(" "));
    }
    for c in &p.constraints {
        let line = match c {
            BijectionConstraint::Assign { entity, value } => {
                format!("(assert (= {} {}))", sym(entity), p.value_index(value).unwrap_or(n))
            }
            BijectionConstraint::Forbid { entity, value } => {
                format!("(assert (not (= {} {})))", sym(entity), p.value_index(value).unwrap_or(n))
            }
            BijectionConstraint::Precedes { before, after } => format!("(assert (< {} {}))", sym(before), sym(after)),
        };
        let _ = writeln!(s, "{line} ; {c}");
    }
    s
}

/// Horn clauses pinned to their least model: a variable holds exactly when it is a true fact
/// or has a supporting rule whose antecedent ranks strictly lower.
fn horn_base(h: &HornProblem) -> String {
    let mut s = String::new();
    s.push_str("(set-logic QF_LIA)\n");
    for v in &h.variables {
        let _ = writeln!(s, "(declare-const {} Bool)", sym(v));
        let _ = writeln!(s, "(declare-const {} Int)", rank_sym(v));
    }
    let mut support: BTreeMap<&str, Vec<String>> = BTreeMap::new();
    for r in &h.rules {
        let _ = writeln!(s, "(assert (=> {} {})) ; {r}", sym(&r.antecedent), sym(&r.consequent));
        support.entry(r.consequent.as_str()).or_default().push(format!(
            "(and {} (< {} {}))",
            sym(&r.antecedent),
            rank_sym(&r.antecedent),
            rank_sym(&r.consequent)
        ));
    }
    for f in &h.facts {
        let lit = if f.value { sym(&f.var) } else { format!("(not {})", sym(&f.var)) };
        let _ = writeln!(s, "(assert {lit}) ; {f}");
    }
    for v in &h.variables {
        if h.facts.iter().any(|f| f.value && &f.var == v) {
            continue;
        }
        let body = match support.get(v.as_str()) {
            None => "false".to_string(),
            Some(b) if b.len() == 1 => b[0].clone(),
            Some(b) => format!("(or {})", b.join(" ")),
        };
        let _ = writeln!(s, "(assert (= {} {body}))", sym(v));
    }
    s
}

fn answer_literal(problem: &LogicProblem, answer: &AssignmentAnswer) -> String {
    let parts: Vec<String> = match (problem, answer) {
        (LogicProblem::Bijection(p), AssignmentAnswer::Bijection(m)) => {
            m.iter().map(|(e, v)| format!("(= {} {})", sym(e), p.value_index(v).unwrap_or(p.values.len()))).collect()
        }
        (LogicProblem::Horn(_), AssignmentAnswer::Horn(m)) => {
            m.iter().map(|(v, t)| if *t { sym(v) } else { format!("(not {})", sym(v)) }).collect()
        }
        _ => vec!["false".to_string()],
    };
    conj(&parts)
}

/// Deterministic SMT-LIB 2 text for the problem and optional answer.
pub fn emit_smtlib(problem: &LogicProblem, answer: Option<&AssignmentAnswer>) -> SmtScripts {
    let base = match problem {
        LogicProblem::Bijection(p) => bijection_base(p),
        LogicProblem::Horn(h) => horn_base(h),
    };
    let check = |assertion: String| format!("{base}(assert {assertion})\n(check-sat)\n");
    match answer {
        None => SmtScripts { base: format!("{base}(check-sat)\n"), satisfies: None, uniqueness: None },
        Some(a) => {
            let lit = answer_literal(problem, a);
            SmtScripts {
                satisfies: Some(check(lit.clone())),
                uniqueness: Some(check(format!("(not {lit})"))),
                base: format!("{base}(check-sat)\n"),
            }
        }
    }
}
