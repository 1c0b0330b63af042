mod common;

use common::{all_traces, check_mutation, mutate, valid_traces, violation_keys, KINDS};
use nyaya_core::validator::ValidationConfig;
use nyaya_harness::{emit_grammar, Acceptor};
use proptest::prelude::*;

fn acceptor() -> Acceptor {
    Acceptor::new(&emit_grammar(&ValidationConfig::default())).unwrap()
}

#[test]
fn there_are_enough_valid_fixtures_to_mutate() {
    let valid = valid_traces();
    assert!(valid.len() >= 10, "only {} valid traces", valid.len());
}

#[test]
fn every_kind_and_position_yields_exactly_its_code() {
    let mut checked = 0;
    let mut failures = Vec::new();
    for (name, text) in valid_traces() {
        for kind in KINDS {
            for pick in 0..12 {
                let Some(m) = mutate(&text, kind, pick) else { continue };
                checked += 1;
                if let Err(e) = check_mutation(&m) {
                    failures.push(format!("{name}: {e}"));
                }
            }
        }
    }
    assert!(checked > 200);
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}

#[test]
fn grammar_agrees_with_validator_on_every_fixture() {
    let acc = acceptor();
    for (name, text) in all_traces() {
        let (valid, keys, _) = violation_keys(&text);
        assert_eq!(acc.accepts(&text), valid, "{name}: validator says {valid} ({keys:?})");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn random_mutations_fail_with_the_target_code(fixture in any::<prop::sample::Index>(), kind in 0usize..4, pick in any::<u64>()) {
        let valid = valid_traces();
        let (name, text) = &valid[fixture.index(valid.len())];
        if let Some(m) = mutate(text, KINDS[kind], pick) {
            prop_assert!(check_mutation(&m).is_ok(), "{}: {:?}", name, check_mutation(&m));
            prop_assert!(!acceptor().accepts(&m.text), "{}: grammar accepted `{}`", name, m.note);
        }
    }
}
