use std::path::PathBuf;

use nyaya_core::logic::*;
use proptest::prelude::*;

fn z3() -> Option<PathBuf> {
    find_solver(None)
}

/// Expected verdicts for scripts (a) and (b), straight from the brute-force oracle.
fn expected(problem: &LogicProblem, answer: &AssignmentAnswer) -> (SolverVerdict, SolverVerdict) {
    let sols = brute_force_solve(problem).unwrap();
    let some = sols.iter().any(|s| answer.is_extended_by(s));
    let all = sols.iter().all(|s| answer.is_extended_by(s));
    let v = |b: bool| if b { SolverVerdict::Sat } else { SolverVerdict::Unsat };
    (v(some), v(!all))
}

fn check(problem: &LogicProblem, answer: &AssignmentAnswer) -> Option<(SolverVerdict, SolverVerdict)> {
    let solver = z3()?;
    let s = emit_smtlib(problem, Some(answer));
    let a = run_solver(s.satisfies.as_ref().unwrap(), &solver, DEFAULT_TIMEOUT).unwrap();
    let b = run_solver(s.uniqueness.as_ref().unwrap(), &solver, DEFAULT_TIMEOUT).unwrap();
    Some((a, b))
}

fn pets() -> LogicProblem {
    LogicProblem::from_json(
        r#"{"kind":"bijection","entities":["Alice","Bob","Carol"],"values":["cat","dog","fish"],
            "constraints":[{"type":"forbid","entity":"Alice","value":"dog"},
                           {"type":"assign","entity":"Bob","value":"cat"},
                           {"type":"forbid","entity":"Carol","value":"fish"}]}"#,
    )
    .unwrap()
}

#[test]
fn pets_scripts() {
    let p = pets();
    let truth = parse_assignment(&p, "Alice has the fish, Bob has the cat, Carol has the dog");
    assert_eq!(expected(&p, &truth), (SolverVerdict::Sat, SolverVerdict::Unsat));
    if let Some(got) = check(&p, &truth) {
        assert_eq!(got, (SolverVerdict::Sat, SolverVerdict::Unsat));
    }
}

#[test]
fn chain_scripts() {
    let p = LogicProblem::from_json(
        r#"{"kind":"horn","variables":["P","Q","R","S"],"facts":[{"var":"P","value":true}],
            "rules":[{"if":"P","then":"Q"},{"if":"Q","then":"R"},{"if":"R","then":"S"}]}"#,
    )
    .unwrap();
    let all = parse_assignment(&p, "P is true, Q is true, R is true, S is true");
    assert_eq!(check(&p, &all).unwrap_or(expected(&p, &all)), (SolverVerdict::Sat, SolverVerdict::Unsat));
}

#[test]
fn unconstrained_is_not_unique() {
    let p = LogicProblem::from_json(r#"{"kind":"bijection","entities":["A","B"],"values":["x","y"]}"#).unwrap();
    let a = parse_assignment(&p, "A: x, B: y");
    assert_eq!(expected(&p, &a).1, SolverVerdict::Sat);
    if let Some(got) = check(&p, &a) {
        assert_eq!(got.1, SolverVerdict::Sat);
    }
}

fn bijection_case() -> impl Strategy<Value = (LogicProblem, AssignmentAnswer)> {
    (1usize..=4)
        .prop_flat_map(|n| {
            (
                Just(n),
                proptest::collection::vec((0..n, 0..n, 0u8..3), 0..5),
                proptest::sample::subsequence((0..n).collect::<Vec<_>>(), 0..=n),
                Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
            )
        })
        .prop_map(|(n, raw, keep, perm)| {
            let entities: Vec<String> = (0..n).map(|i| format!("E{i}")).collect();
            let values: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
            let constraints = raw
                .into_iter()
                .map(|(a, b, k)| match k {
                    0 => BijectionConstraint::Forbid { entity: entities[a].clone(), value: values[b].clone() },
                    1 => BijectionConstraint::Assign { entity: entities[a].clone(), value: values[b].clone() },
                    _ => BijectionConstraint::Precedes { before: entities[a].clone(), after: entities[b].clone() },
                })
                .collect();
            let answer = keep.iter().map(|&i| (entities[i].clone(), values[perm[i]].clone())).collect();
            (
                LogicProblem::Bijection(BijectionProblem { entities, values, constraints }),
                AssignmentAnswer::Bijection(answer),
            )
        })
}

fn horn_case() -> impl Strategy<Value = (LogicProblem, AssignmentAnswer)> {
    (1usize..=5)
        .prop_flat_map(|n| {
            (
                Just(n),
                proptest::collection::vec((0..n, any::<bool>()), 0..3),
                proptest::collection::vec((0..n, 0..n), 0..7),
                proptest::collection::vec(proptest::option::of(any::<bool>()), n),
            )
        })
        .prop_map(|(n, facts, rules, ans)| {
            let vars: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
            let answer = ans.iter().enumerate().filter_map(|(i, t)| t.map(|t| (vars[i].clone(), t))).collect();
            let h = HornProblem {
                facts: facts.into_iter().map(|(i, value)| Literal { var: vars[i].clone(), value }).collect(),
                rules: rules
                    .into_iter()
                    .map(|(a, b)| HornRule { antecedent: vars[a].clone(), consequent: vars[b].clone() })
                    .collect(),
                variables: vars,
            };
            (LogicProblem::Horn(h), AssignmentAnswer::Horn(answer))
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn solver_matches_oracle_bijection((p, a) in bijection_case()) {
        if let Some(got) = check(&p, &a) {
            prop_assert_eq!(got, expected(&p, &a), "{}", emit_smtlib(&p, Some(&a)).satisfies.unwrap());
        }
    }

    #[test]
    fn solver_matches_oracle_horn((p, a) in horn_case()) {
        if let Some(got) = check(&p, &a) {
            prop_assert_eq!(got, expected(&p, &a), "{}", emit_smtlib(&p, Some(&a)).satisfies.unwrap());
        }
    }
}
