use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::problem::*;
use super::LogicError;

/// Truth of a Horn variable when unforced literals are left open.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Truth {
    True,
    False,
    Undetermined,
}

/// Something the answer broke.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Violated {
    Constraint { constraint: BijectionConstraint },
    Distinct { value: String },
    Fact { fact: Literal },
    Rule { rule: HornRule },
    Unknown { name: String },
}

impl fmt::Display for Violated {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violated::Constraint { constraint } => constraint.fmt(f),
            Violated::Distinct { value } => write!(f, "distinct({value})"),
            Violated::Fact { fact } => fact.fmt(f),
            Violated::Rule { rule } => rule.fmt(f),
            Violated::Unknown { name } => write!(f, "unknown({name})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Verdict {
    UniqueAndMatches,
    SatisfiesButNotUnique,
    Violates { violated: Vec<Violated> },
    NoSolution,
    Mismatch { expected: AssignmentAnswer },
}

impl Verdict {
    pub fn key(&self) -> &'static str {
        match self {
            Verdict::UniqueAndMatches => "unique_and_matches",
            Verdict::SatisfiesButNotUnique => "satisfies_but_not_unique",
            Verdict::Violates { .. } => "violates",
            Verdict::NoSolution => "no_solution",
            Verdict::Mismatch { .. } => "mismatch",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Violates { violated } => {
                let parts: Vec<String> = violated.iter().map(|v| v.to_string()).collect();
                write!(f, "violates({})", parts.join(", "))
            }
            Verdict::Mismatch { expected } => write!(f, "mismatch(expected {expected})"),
            other => f.write_str(other.key()),
        }
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    // Heap's algorithm, then sorted so enumeration order is lexicographic.
    let mut perm: Vec<usize> = (0..n).collect();
    let mut out = vec![perm.clone()];
    let mut c = vec![0usize; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            out.push(perm.clone());
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out.sort();
    out
}

/// Constraints the (possibly partial) bijection answer breaks.
pub fn bijection_violations(p: &BijectionProblem, answer: &BTreeMap<String, String>) -> Vec<Violated> {
    let mut out = Vec::new();
    for (e, v) in answer {
        if !p.entities.contains(e) {
            out.push(Violated::Unknown { name: e.clone() });
        }
        if p.value_index(v).is_none() {
            out.push(Violated::Unknown { name: v.clone() });
        }
    }
    let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
    for v in answer.values() {
        *seen.entry(v.as_str()).or_default() += 1;
    }
    for (v, count) in seen {
        if count > 1 {
            out.push(Violated::Distinct { value: v.to_string() });
        }
    }
    for c in &p.constraints {
        let broken = match c {
            BijectionConstraint::Assign { entity, value } => answer.get(entity).is_some_and(|v| v != value),
            BijectionConstraint::Forbid { entity, value } => answer.get(entity) == Some(value),
            BijectionConstraint::Precedes { before, after } => {
                let idx = |e: &String| answer.get(e).and_then(|v| p.value_index(v));
                matches!((idx(before), idx(after)), (Some(a), Some(b)) if a >= b)
            }
        };
        if broken {
            out.push(Violated::Constraint { constraint: c.clone() });
        }
    }
    out
}

pub fn horn_violations(p: &HornProblem, answer: &BTreeMap<String, bool>) -> Vec<Violated> {
    let mut out = Vec::new();
    for k in answer.keys() {
        if !p.variables.contains(k) {
            out.push(Violated::Unknown { name: k.clone() });
        }
    }
    for f in &p.facts {
        if answer.get(&f.var).is_some_and(|v| *v != f.value) {
            out.push(Violated::Fact { fact: f.clone() });
        }
    }
    for r in &p.rules {
        if answer.get(&r.antecedent) == Some(&true) && answer.get(&r.consequent) == Some(&false) {
            out.push(Violated::Rule { rule: r.clone() });
        }
    }
    out
}

/// Least fixed point of the true facts under the rules. `None` when a false fact gets derived.
pub fn horn_least_model(p: &HornProblem) -> Option<BTreeMap<String, bool>> {
    let mut truth: BTreeMap<&str, bool> = p.variables.iter().map(|v| (v.as_str(), false)).collect();
    for f in p.facts.iter().filter(|f| f.value) {
        truth.insert(&f.var, true);
    }
    loop {
        let mut changed = false;
        for r in &p.rules {
            if truth[r.antecedent.as_str()] && !truth[r.consequent.as_str()] {
                truth.insert(&r.consequent, true);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    if p.facts.iter().any(|f| !f.value && truth[f.var.as_str()]) {
        return None;
    }
    Some(truth.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
}

/// Horn solve leaving unforced variables undetermined. Forced-false literals come from facts only.
pub fn solve_horn_open(p: &HornProblem) -> Result<Option<BTreeMap<String, Truth>>, LogicError> {
    check_horn_size(p)?;
    let Some(model) = horn_least_model(p) else {
        return Ok(None);
    };
    let forced_false: Vec<&str> = p.facts.iter().filter(|f| !f.value).map(|f| f.var.as_str()).collect();
    Ok(Some(
        model
            .into_iter()
            .map(|(k, v)| {
                let t = if v {
                    Truth::True
                } else if forced_false.contains(&k.as_str()) {
                    Truth::False
                } else {
                    Truth::Undetermined
                };
                (k, t)
            })
            .collect(),
    ))
}

fn check_horn_size(p: &HornProblem) -> Result<(), LogicError> {
    if p.variables.len() > MAX_HORN_VARS {
        return Err(LogicError::TooLarge { size: p.variables.len(), limit: MAX_HORN_VARS });
    }
    Ok(())
}

/// Every solution, closed-world for Horn problems.
pub fn brute_force_solve(problem: &LogicProblem) -> Result<Vec<AssignmentAnswer>, LogicError> {
    problem.validate()?;
    match problem {
        LogicProblem::Bijection(p) => {
            if p.entities.len() > MAX_BIJECTION {
                return Err(LogicError::TooLarge { size: p.entities.len(), limit: MAX_BIJECTION });
            }
            Ok(permutations(p.entities.len())
                .into_iter()
                .map(|perm| {
                    p.entities
                        .iter()
                        .zip(perm)
                        .map(|(e, i)| (e.clone(), p.values[i].clone()))
                        .collect::<BTreeMap<_, _>>()
                })
                .filter(|m| bijection_violations(p, m).is_empty())
                .map(AssignmentAnswer::Bijection)
                .collect())
        }
        LogicProblem::Horn(p) => {
            check_horn_size(p)?;
            Ok(horn_least_model(p).map(AssignmentAnswer::Horn).into_iter().collect())
        }
    }
}

fn is_complete(problem: &LogicProblem, answer: &AssignmentAnswer) -> bool {
    match (problem, answer) {
        (LogicProblem::Bijection(p), AssignmentAnswer::Bijection(m)) => p.entities.iter().all(|e| m.contains_key(e)),
        (LogicProblem::Horn(p), AssignmentAnswer::Horn(m)) => p.variables.iter().all(|v| m.contains_key(v)),
        _ => false,
    }
}

pub fn violations(problem: &LogicProblem, answer: &AssignmentAnswer) -> Vec<Violated> {
    match (problem, answer) {
        (LogicProblem::Bijection(p), AssignmentAnswer::Bijection(m)) => bijection_violations(p, m),
        (LogicProblem::Horn(p), AssignmentAnswer::Horn(m)) => horn_violations(p, m),
        _ => vec![Violated::Unknown { name: "answer kind".into() }],
    }
}

/// Judge an answer against the problem. A partial answer that breaks nothing is a mismatch.
pub fn verify_answer(problem: &LogicProblem, answer: &AssignmentAnswer) -> Result<Verdict, LogicError> {
    let solutions = brute_force_solve(problem)?;
    let violated = violations(problem, answer);
    if !violated.is_empty() {
        return Ok(Verdict::Violates { violated });
    }
    if solutions.is_empty() {
        return Ok(Verdict::NoSolution);
    }
    let is_solution = is_complete(problem, answer) && solutions.contains(answer);
    Ok(match (is_solution, solutions.len()) {
        (true, 1) => Verdict::UniqueAndMatches,
        (true, _) => Verdict::SatisfiesButNotUnique,
        (false, _) => Verdict::Mismatch { expected: solutions[0].clone() },
    })
}
