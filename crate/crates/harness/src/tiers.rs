//! The short-circuiting evaluation chain.

use nyaya_core::logic::{
    assess_semantics, emit_smtlib, parse_assignment, run_solver, verify_answer, AssignmentAnswer, LogicProblem,
    SemanticAssessment, SolverVerdict, Verdict,
};
use nyaya_core::parser::{parse_document, ParseOptions, ParsedDocument};
use nyaya_core::scoring::{composite_reward, Condition, RecordMetrics, RewardInputs, RewardWeights};
use nyaya_core::validator::{validate, ValidationReport};
use std::path::Path;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::config::{EvalConfig, Tier};
use crate::judge::{judge_decision, JudgeClient, JudgeDecision, JudgeScores};

/// A problem to evaluate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Example {
    pub id: String,
    pub problem_statement: String,
    pub ground_truth: String,
    pub z3_verifiable: bool,
    pub problem: Option<LogicProblem>,
}

impl Example {
    /// Build from a problem document: frontmatter plus a `# Problem` block.
    pub fn from_document(text: &str) -> Option<Example> {
        let doc = parse_document(text, &ParseOptions::default());
        let fm = doc.frontmatter?;
        Some(Example {
            id: fm.id?,
            problem_statement: doc.problem_statement,
            ground_truth: fm.ground_truth?,
            z3_verifiable: fm.z3_verifiable.unwrap_or(false),
            problem: None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TierStatus {
    Passed,
    Failed,
    /// Not applicable, e.g. formal checks on a non-verifiable example.
    Skipped,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TierOutcome {
    pub tier: Tier,
    pub status: TierStatus,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverCheck {
    pub satisfies: Option<SolverVerdict>,
    pub uniqueness: Option<SolverVerdict>,
    pub error: Option<String>,
    /// Solver verdicts match the oracle.
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub id: String,
    pub condition: Condition,
    pub output: String,
    pub parsed: ParsedDocument,
    pub report: ValidationReport,
    /// Always computed, whether or not Tier 3 ran.
    pub semantic: SemanticAssessment,
    pub verdict: Option<Verdict>,
    pub solver: Option<SolverCheck>,
    pub judge: Option<JudgeScores>,
    pub judge_decision: Option<JudgeDecision>,
    pub reward: f64,
    pub outcomes: Vec<TierOutcome>,
}

impl EvalRecord {
    pub fn outcome(&self, tier: Tier) -> Option<&TierOutcome> {
        self.outcomes.iter().find(|o| o.tier == tier)
    }

    pub fn metrics(&self) -> RecordMetrics {
        RecordMetrics {
            id: self.id.clone(),
            parse_ok: self.parsed.parse_ok(),
            valid: self.report.valid,
            semantic_match: self.semantic.verdict == Some(true),
            output_length: self.output.split_whitespace().count(),
            failures: self.parsed.failures.clone(),
            condition: Some(self.condition),
        }
    }
}

/// Judge 0-10 score onto the reward's 1-5 scale.
fn judge_to_scale(v: u8) -> f64 {
    1.0 + 4.0 * v as f64 / 10.0
}

fn formal_check(problem: &LogicProblem, answer_text: &str, config: &EvalConfig) -> (Verdict, Option<SolverCheck>) {
    let answer = parse_assignment(problem, answer_text);
    let verdict = match verify_answer(problem, &answer) {
        Ok(v) => v,
        Err(e) => {
            let check = SolverCheck { satisfies: None, uniqueness: None, error: Some(e.to_string()), agrees: false };
            return (Verdict::NoSolution, Some(check));
        }
    };
    let solver = config.solver.as_ref().map(|path| cross_check(problem, &answer, path, config.solver_timeout));
    (verdict, solver)
}

/// Run both check scripts and compare them with what the oracle's solution set implies.
pub fn cross_check(problem: &LogicProblem, answer: &AssignmentAnswer, solver: &Path, timeout: Duration) -> SolverCheck {
    let scripts = emit_smtlib(problem, Some(answer));
    let run = |s: &Option<String>| run_solver(s.as_deref().unwrap_or(""), solver, timeout);
    let (a, b) = match (run(&scripts.satisfies), run(&scripts.uniqueness)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => {
            return SolverCheck { satisfies: None, uniqueness: None, error: Some(e.to_string()), agrees: false }
        }
    };
    let sols = nyaya_core::logic::brute_force_solve(problem).unwrap_or_default();
    let some = sols.iter().any(|s| answer.is_extended_by(s));
    let all = sols.iter().all(|s| answer.is_extended_by(s));
    let want_a = if some { SolverVerdict::Sat } else { SolverVerdict::Unsat };
    let want_b = if all { SolverVerdict::Unsat } else { SolverVerdict::Sat };
    SolverCheck { satisfies: Some(a), uniqueness: Some(b), error: None, agrees: a == want_a && b == want_b }
}

/// Run the configured tiers over one output, stopping at the first failure.
pub fn run_tiers(example: &Example, output: &str, config: &EvalConfig, judge: Option<&dyn JudgeClient>) -> EvalRecord {
    let vcfg = &config.validation;
    let parsed = parse_document(output, &vcfg.parse_options());
    let report = validate(&parsed, vcfg);
    let semantic = assess_semantics(
        output,
        Some(&parsed.trace),
        &example.ground_truth,
        example.problem.as_ref(),
        config.threshold,
    );

    let mut outcomes: Vec<TierOutcome> = Vec::new();
    let mut judge_scores = None;
    let mut decision = None;
    let mut verdict = None;
    let mut solver = None;

    for &tier in &config.tiers {
        let (status, detail) = match tier {
            Tier::Structural => {
                if report.valid {
                    (TierStatus::Passed, "valid".to_string())
                } else {
                    let codes: Vec<&str> = report.violations.iter().map(|v| v.code.key()).collect();
                    (TierStatus::Failed, codes.join(", "))
                }
            }
            Tier::Judge => match judge {
                None => (TierStatus::Error, "no judge client configured".to_string()),
                Some(j) => match j.score(&example.id, output) {
                    Ok(s) => {
                        let d = judge_decision(&s);
                        judge_scores = Some(s);
                        decision = Some(d);
                        let status = if d == JudgeDecision::Reject { TierStatus::Failed } else { TierStatus::Passed };
                        (status, format!("{}/90 {:?}", s.total(), d))
                    }
                    Err(e) => (TierStatus::Error, e.to_string()),
                },
            },
            Tier::GroundTruth => match semantic.verdict {
                Some(true) => (TierStatus::Passed, format!("similarity {:.3}", semantic.answer.similarity)),
                Some(false) => (TierStatus::Failed, format!("similarity {:.3}", semantic.answer.similarity)),
                None => (TierStatus::Failed, "no answer found".to_string()),
            },
            Tier::Formal => match (&example.problem, example.z3_verifiable) {
                (Some(problem), true) => {
                    let answer_text = parsed
                        .trace
                        .nirnaya
                        .as_ref()
                        .and_then(|n| n.final_answer.clone())
                        .unwrap_or_else(|| semantic.answer.extracted_answer.clone());
                    let (v, check) = formal_check(problem, &answer_text, config);
                    let (status, detail) = match &check {
                        Some(c) if c.error.is_some() => (TierStatus::Error, c.error.clone().unwrap_or_default()),
                        Some(c) if !c.agrees => (TierStatus::Failed, format!("{v}; solver disagrees")),
                        _ if v == Verdict::UniqueAndMatches => (TierStatus::Passed, v.to_string()),
                        _ => (TierStatus::Failed, v.to_string()),
                    };
                    verdict = Some(v);
                    solver = check;
                    (status, detail)
                }
                _ => (TierStatus::Skipped, "not verifiable".to_string()),
            },
        };
        let stop = matches!(status, TierStatus::Failed | TierStatus::Error);
        outcomes.push(TierOutcome { tier, status, detail });
        if stop {
            break;
        }
    }

    let inputs = RewardInputs {
        format_ok: report.valid,
        semantic_ok: semantic.verdict == Some(true),
        pramana: judge_scores.map_or(1.0, |s| {
            let a = s.as_array();
            a[1..5].iter().map(|v| judge_to_scale(*v)).sum::<f64>() / 4.0
        }),
        tarka: judge_scores.map_or(1.0, |s| judge_to_scale(s.tarka_meaningfulness)),
        consistent: verdict.as_ref() == Some(&Verdict::UniqueAndMatches),
    };
    let reward = composite_reward(&inputs, &RewardWeights::default()).unwrap_or(0.0);

    EvalRecord {
        id: example.id.clone(),
        condition: config.condition(),
        output: output.to_string(),
        parsed,
        report,
        semantic,
        verdict,
        solver,
        judge: judge_scores,
        judge_decision: decision,
        reward,
        outcomes,
    }
}
