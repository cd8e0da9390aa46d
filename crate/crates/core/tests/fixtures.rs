//! Invariants checked on every bundled fixture.

use std::collections::BTreeSet;

use horncat_core::automata::{build_automata, check_herbrand_model, theorem1_check};
use horncat_core::fixtures::{self, ALL};
use horncat_core::frontend::{clausify, load_system, parse_script, skolemize_existentials};
use horncat_core::ir::{check_well_sorted, ChcSystem, Term};
use horncat_core::model::{
    cardinality_schedule, find_model, verify_model, FiniteModel, FindOutcome, SearchBudget, Verification,
};
use horncat_core::preprocess::run_pipeline;
use horncat_core::refuter::{bounded_refute, least_model_facts, replay_derivation, RefuteOutcome};

fn pipelined(text: &str) -> (ChcSystem, ChcSystem) {
    let (original, _) = load_system(text).unwrap();
    let (pre, _) = run_pipeline(&original).unwrap();
    (original, pre)
}

fn first_model(system: &ChcSystem, max_total: usize) -> Option<FiniteModel> {
    let budget = SearchBudget {
        max_total,
        ..SearchBudget::default()
    };
    for card in cardinality_schedule(&system.signature, &budget) {
        if let FindOutcome::Model(m) = find_model(system, &card, &budget).unwrap() {
            return Some(m);
        }
    }
    None
}

#[test]
fn printed_scripts_parse_back_identically() {
    for (name, text) in ALL {
        let script = parse_script(text).unwrap();
        let again = parse_script(&script.to_string()).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(script, again, "{name}");
    }
}

#[test]
fn clausified_fixtures_are_well_sorted() {
    for (name, text) in ALL {
        let system = clausify(&parse_script(text).unwrap()).unwrap();
        let first = check_well_sorted(&system);
        assert!(first.is_empty(), "{name}: {first:?}");
        assert_eq!(first, check_well_sorted(&system), "{name}");
    }
}

#[test]
fn skolemization_is_idempotent() {
    for (name, text) in ALL {
        let system = clausify(&parse_script(text).unwrap()).unwrap();
        let (once, record) = skolemize_existentials(&system).unwrap();
        let (twice, again) = skolemize_existentials(&once).unwrap();
        assert_eq!(once, twice, "{name}");
        assert!(again.is_empty(), "{name}");
        if record.is_empty() {
            assert_eq!(system, once, "{name}");
        }
    }
}

#[test]
fn pipeline_is_deterministic_and_constraint_free() {
    for (name, text) in ALL {
        let (_, a) = pipelined(text);
        let (_, b) = pipelined(text);
        assert_eq!(a, b, "{name}");
        assert_eq!(a.to_string(), b.to_string(), "{name}");
        assert!(a.is_constraint_free(), "{name}");
        let uses_selector = a.clauses.iter().any(|c| c.terms().iter().any(|t| t.has_selector()));
        assert!(!uses_selector, "{name}");
        assert!(check_well_sorted(&a).is_empty(), "{name}");
    }
}

#[test]
fn refuter_facts_grow_with_the_height_bound() {
    for (name, text) in ALL {
        let (_, system) = pipelined(text);
        let mut previous: BTreeSet<String> = BTreeSet::new();
        for h in 1..=4 {
            let facts = least_model_facts(&system, h);
            let current: BTreeSet<String> = facts.iter().map(|a| a.to_string()).collect();
            assert!(previous.is_subset(&current), "{name} at height {h}");
            previous = current;
        }
    }
}

#[test]
fn models_and_refutations_never_coexist() {
    for (name, text) in ALL {
        let (_, system) = pipelined(text);
        let model = first_model(&system, 4);
        if let Some(m) = &model {
            assert_eq!(verify_model(&system, m).unwrap(), Verification::Ok, "{name}");
        }
        let refuted = match bounded_refute(&system, 4) {
            RefuteOutcome::Refuted(d) => {
                replay_derivation(&system, &d).unwrap();
                true
            }
            _ => false,
        };
        assert!(!(model.is_some() && refuted), "{name}");
    }
}

#[test]
fn reflexivity_forcing_fixtures_have_no_small_models() {
    for text in [fixtures::DIAG, fixtures::LTGT] {
        let (_, system) = pipelined(text);
        assert!(first_model(&system, 4).is_none());
    }
}

#[test]
fn automata_of_sat_fixtures_pass_the_herbrand_check() {
    let cases = [
        ("even", fixtures::EVEN, 4),
        ("incdec", fixtures::INCDEC, 4),
        ("evenleft", fixtures::EVENLEFT, 4),
        ("diseq_zz", fixtures::DISEQ_ZZ, 4),
        ("stlc", fixtures::STLC, 3),
    ];
    for (name, text, height) in cases {
        let (original, system) = pipelined(text);
        let model = first_model(&system, 6).unwrap_or_else(|| panic!("{name}: no model"));
        let automata = build_automata(&model, &system.signature, false).unwrap();
        for a in automata.values() {
            assert!(a.table.is_complete(), "{name}");
        }
        assert!(theorem1_check(&model, &automata, &system.signature, 5).is_ok(), "{name}");
        let report = check_herbrand_model(&original, &automata, height).unwrap();
        assert!(report.passed(), "{name}: {report}");
    }
}

fn numeral(n: usize) -> Term {
    (0..n).fold(Term::constant("Z"), |t, _| Term::app("S", vec![t]))
}

#[test]
fn even_automaton_language_grows_by_one_numeral_every_two_heights() {
    let (_, system) = pipelined(fixtures::EVEN);
    let model = first_model(&system, 4).unwrap();
    let even = &build_automata(&model, &system.signature, false).unwrap()["even"];
    for k in 0..=9 {
        let got: BTreeSet<Term> = even
            .enumerate_accepted(2 * k + 2)
            .into_iter()
            .map(|t| t[0].clone())
            .collect();
        let want: BTreeSet<Term> = (0..=k).map(|n| numeral(2 * n)).collect();
        assert_eq!(got, want, "height {}", 2 * k + 2);
    }
}
