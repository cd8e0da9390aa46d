use std::collections::BTreeSet;
use std::sync::Arc;

use indexmap::IndexMap;

use super::*;
use crate::fixtures;
use crate::frontend::load_system;
use crate::ir::{GroundTerms, Term};
use crate::model::FiniteModel;

fn nat(k: usize) -> Term {
    (0..k).fold(Term::constant("Z"), |t, _| Term::app("S", vec![t]))
}

const EVEN_MODEL: &str = "sort Nat = {0,1}\nfun Z: ->0\nfun S: 0->1, 1->0\npred even = {(0)}\n";

fn even_automata() -> (crate::ir::ChcSystem, FiniteModel, IndexMap<String, TreeAutomaton>) {
    let (sys, _) = load_system(fixtures::EVEN).unwrap();
    let model = FiniteModel::parse(EVEN_MODEL, &sys.signature).unwrap();
    let automata = build_automata(&model, &sys.signature, false).unwrap();
    (sys, model, automata)
}

#[test]
fn even_automaton_accepts_even_numerals() {
    let (_, _, automata) = even_automata();
    let even = &automata["even"];
    assert!(even.table.is_complete());
    assert!(even.accepts(&[nat(4)]));
    assert!(!even.accepts(&[nat(1)]));
    let accepted: Vec<Term> = even.enumerate_accepted(20).into_iter().map(|t| t[0].clone()).collect();
    assert_eq!(accepted, (0..10).map(|n| nat(2 * n)).collect::<Vec<_>>());
}

#[test]
fn stuck_component_is_rejected() {
    let mut table = TransitionTable::default();
    table.states.insert("Nat".into(), 1);
    table.constructors.insert("Z".into(), (vec![], "Nat".into()));
    table.constructors.insert("S".into(), (vec!["Nat".into()], "Nat".into()));
    table.insert_rule("Z", vec![], 0);
    let a = TreeAutomaton {
        predicate: "p".into(),
        sorts: vec!["Nat".into()],
        table: Arc::new(table),
        finals: BTreeSet::from([vec![0]]),
    };
    assert!(!a.table.is_complete());
    assert!(a.accepts(&[nat(0)]));
    assert!(!a.accepts(&[nat(1)]));
}

#[test]
fn propositional_automaton_accepts_valid_formulas() {
    // States: 0 = false, 1 = true; accepts formulas that evaluate to true.
    let sig = fixtures::prop_signature();
    let text = "\
automaton valid : Prop
states Prop: s0, s1
top -> s1
bot -> s0
and(s0,s0) -> s0
and(s0,s1) -> s0
and(s1,s0) -> s0
and(s1,s1) -> s1
or(s0,s0) -> s0
or(s0,s1) -> s1
or(s1,s0) -> s1
or(s1,s1) -> s1
imp(s0,s0) -> s1
imp(s0,s1) -> s1
imp(s1,s0) -> s0
imp(s1,s1) -> s1
final: (s1)
";
    let a = parse_automaton(text).unwrap();
    assert!(a.table.is_complete());
    let terms = GroundTerms::new(&sig, 3);
    fn truth(t: &Term) -> bool {
        let Term::App(c, xs) = t else { unreachable!() };
        match c.as_str() {
            "top" => true,
            "bot" => false,
            "and" => truth(&xs[0]) && truth(&xs[1]),
            "or" => truth(&xs[0]) || truth(&xs[1]),
            _ => !truth(&xs[0]) || truth(&xs[1]),
        }
    }
    for t in terms.upto("Prop", 3) {
        assert_eq!(a.accepts(std::slice::from_ref(t)), truth(t), "{t}");
    }
    assert_eq!(serialize_automaton(&a), text);
}

#[test]
fn text_round_trip() {
    let (_, _, automata) = even_automata();
    let a = &automata["even"];
    let text = serialize_automaton(a);
    assert!(text.contains("S(s1) -> s0"));
    let back = parse_automaton(&text).unwrap();
    assert_eq!(back.finals, a.finals);
    assert_eq!(*back.table, *a.table);
    assert_eq!(serialize_automaton(&back), text);
}

#[test]
fn duplicate_left_hand_side_is_rejected() {
    let text = "automaton p : Nat\nstates Nat: s0, s1\nZ -> s0\nZ -> s1\nfinal: (s0)\n";
    assert!(matches!(
        parse_automaton(text),
        Err(AutomatonParseError::Nondeterministic { line: 4, .. })
    ));
}

#[test]
fn unknown_state_is_a_syntax_error() {
    let text = "automaton p : Nat\nstates Nat: s0\nZ -> s7\nfinal: (s0)\n";
    assert!(matches!(
        parse_automaton(text),
        Err(AutomatonParseError::Syntax { line: 3, .. })
    ));
}

#[test]
fn automata_agree_with_even_model() {
    let (sys, model, automata) = even_automata();
    let report = theorem1_check(&model, &automata, &sys.signature, 5);
    assert!(report.is_ok());
    assert_eq!(report.effective_height["even"], 5);
}

#[test]
fn herbrand_check_passes_for_even_and_fails_when_all_states_final() {
    let (sys, _, automata) = even_automata();
    let report = check_herbrand_model(&sys, &automata, 4).unwrap();
    assert!(report.passed(), "{report}");

    let mut broken = automata.clone();
    broken.get_mut("even").unwrap().finals = BTreeSet::from([vec![0], vec![1]]);
    let report = check_herbrand_model(&sys, &broken, 4).unwrap();
    let failure = report.first_failure().expect("query clause must fail");
    let assignment = failure.failure.as_ref().unwrap();
    assert_eq!(assignment[0].1, nat(0));
}
