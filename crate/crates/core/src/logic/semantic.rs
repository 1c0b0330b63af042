use serde::{Deserialize, Serialize};

use super::answer::parse_assignment;
use super::oracle::{verify_answer, Verdict};
use super::problem::*;
use crate::model::NyayaTrace;
use crate::scoring::{match_answer, AnswerMethod, MatchResult};

/// Where a semantic verdict came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SemanticSource {
    LabeledAnswer,
    Conclusions,
    LastLine,
    /// A structured trace that never states an answer, usually truncated.
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemanticAssessment {
    /// `None` means unknown.
    pub verdict: Option<bool>,
    pub source: SemanticSource,
    pub answer: MatchResult,
    pub oracle: Option<Verdict>,
}

/// Fold the problem's given facts into a partial answer drawn from the trace.
fn with_givens(problem: &LogicProblem, answer: AssignmentAnswer) -> AssignmentAnswer {
    match (problem, answer) {
        (LogicProblem::Horn(h), AssignmentAnswer::Horn(mut m)) => {
            for f in &h.facts {
                m.entry(f.var.clone()).or_insert(f.value);
            }
            AssignmentAnswer::Horn(m)
        }
        (LogicProblem::Bijection(p), AssignmentAnswer::Bijection(mut m)) => {
            for c in &p.constraints {
                if let BijectionConstraint::Assign { entity, value } = c {
                    m.entry(entity.clone()).or_insert_with(|| value.clone());
                }
            }
            AssignmentAnswer::Bijection(m)
        }
        (_, a) => a,
    }
}

fn complete(problem: &LogicProblem, a: &AssignmentAnswer) -> bool {
    match problem {
        LogicProblem::Bijection(p) => a.len() == p.entities.len(),
        LogicProblem::Horn(h) => a.len() == h.variables.len(),
    }
}

/// Decide semantic correctness for one output.
///
/// A labelled final answer is scored by token recall. Without one, the Nigamana lines of complete
/// syllogisms are read as an answer and checked against the problem. A structured trace with
/// neither is unknown; plain prose falls back to its last line.
pub fn assess_semantics(
    output: &str,
    trace: Option<&NyayaTrace>,
    ground_truth: &str,
    problem: Option<&LogicProblem>,
    threshold: f64,
) -> SemanticAssessment {
    let answer = match_answer(output, ground_truth, threshold);
    if answer.method != AnswerMethod::LastLine {
        return SemanticAssessment {
            verdict: Some(answer.semantic_match),
            source: SemanticSource::LabeledAnswer,
            answer,
            oracle: None,
        };
    }
    let structured = trace.filter(|t| t.phase_count() > 0);
    let Some(trace) = structured else {
        return SemanticAssessment {
            verdict: Some(answer.semantic_match),
            source: SemanticSource::LastLine,
            answer,
            oracle: None,
        };
    };
    if let Some(problem) = problem {
        let conclusions: Vec<&str> =
            trace.syllogisms().iter().filter(|s| s.is_complete()).filter_map(|s| s.nigamana.as_deref()).collect();
        let derived = parse_assignment(problem, &conclusions.join("\n"));
        if !derived.is_empty() {
            let merged = with_givens(problem, derived);
            if let Ok(v) = verify_answer(problem, &merged) {
                let verdict = match &v {
                    Verdict::UniqueAndMatches => Some(true),
                    Verdict::Violates { .. } | Verdict::NoSolution => Some(false),
                    _ if complete(problem, &merged) => Some(false),
                    _ => None,
                };
                return SemanticAssessment { verdict, source: SemanticSource::Conclusions, answer, oracle: Some(v) };
            }
        }
    }
    SemanticAssessment { verdict: None, source: SemanticSource::Undetermined, answer, oracle: None }
}
