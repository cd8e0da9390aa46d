//! Property tests over random terms and random clause systems.

use std::collections::BTreeSet;

use horncat_core::fixtures::{self, ALL};
use horncat_core::frontend::load_system;
use horncat_core::fuzz::{random_system, FuzzLimits};
use horncat_core::ir::{check_well_sorted, count_ground_terms, enumerate_ground_terms, term_height, Term};
use horncat_core::model::{cardinality_schedule, find_model, verify_model, FindOutcome, SearchBudget, Verification};
use horncat_core::refuter::{least_model_facts_with, ChainLimits};
use proptest::prelude::*;

/// Random ground terms over `Nat` and `Tree` constructors.
fn ground_term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![Just(Term::constant("Z")), Just(Term::constant("leaf"))];
    leaf.prop_recursive(8, 64, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|t| Term::app("S", vec![t])),
            (inner.clone(), inner).prop_map(|(l, r)| Term::app("node", vec![l, r])),
        ]
    })
}

fn reference_height(t: &Term) -> usize {
    match t {
        Term::App(_, args) => 1 + args.iter().map(reference_height).max().unwrap_or(0),
        _ => unreachable!("ground terms only"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn term_height_matches_reference(t in ground_term()) {
        prop_assert_eq!(term_height(&t).unwrap(), reference_height(&t));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn well_sortedness_check_is_idempotent(seed in any::<u64>()) {
        let system = random_system(seed, FuzzLimits::default());
        let first = check_well_sorted(&system);
        prop_assert_eq!(first, check_well_sorted(&system));
    }

    #[test]
    fn seed_never_changes_whether_a_model_exists(system_seed in 0u64..10_000, a in any::<u64>(), b in any::<u64>()) {
        let system = random_system(system_seed, FuzzLimits::default());
        let budget = |seed| SearchBudget { max_total: 4, seed: Some(seed), ..SearchBudget::default() };
        for card in cardinality_schedule(&system.signature, &budget(a)) {
            let x = find_model(&system, &card, &budget(a)).unwrap();
            let y = find_model(&system, &card, &budget(b)).unwrap();
            prop_assert_eq!(matches!(x, FindOutcome::Model(_)), matches!(y, FindOutcome::Model(_)), "{}", card);
            for outcome in [x, y] {
                if let FindOutcome::Model(m) = outcome {
                    prop_assert_eq!(verify_model(&system, &m).unwrap(), Verification::Ok);
                }
            }
        }
    }

    #[test]
    fn refuter_facts_are_monotone_in_height(seed in any::<u64>()) {
        let system = random_system(seed, FuzzLimits::default());
        let limits = ChainLimits { max_facts: 20_000, ..ChainLimits::default() };
        let mut previous: BTreeSet<String> = BTreeSet::new();
        for h in 1..=3 {
            let facts = least_model_facts_with(&system, h, limits);
            if !facts.is_saturated() {
                break;
            }
            let current: BTreeSet<String> = facts.iter().map(|a| a.to_string()).collect();
            prop_assert!(previous.is_subset(&current), "height {}", h);
            previous = current;
        }
    }
}

/// Enumeration is height-bounded and monotone in the bound on every fixture
/// signature. Sorts whose term count explodes are checked up to the last
/// height with at most `CAP` terms.
#[test]
fn enumeration_is_monotone_and_height_bounded() {
    const CAP: u128 = 100_000;
    let mut signatures = vec![fixtures::nat_signature(), fixtures::tree_signature(), fixtures::list_signature()];
    signatures.extend(ALL.iter().map(|(_, text)| load_system(text).unwrap().0.signature));
    for sig in &signatures {
        for sort in sig.sorts() {
            let mut previous: Vec<Term> = Vec::new();
            for h in 1..=5 {
                if count_ground_terms(sig, h)[sort] > CAP {
                    break;
                }
                let terms = enumerate_ground_terms(sig, sort, h).unwrap();
                assert!(terms.iter().all(|t| term_height(t).unwrap() <= h), "{sort} at {h}");
                assert_eq!(&terms[..previous.len()], &previous[..], "{sort} at {h}");
                previous = terms;
            }
        }
    }
}
