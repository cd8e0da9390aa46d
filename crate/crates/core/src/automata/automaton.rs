use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use indexmap::IndexMap;
use thiserror::Error;

use crate::ir::{GroundTerms, PredicateOrigin, Signature, Term};
use crate::model::{tuples_over, FiniteModel};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomataError {
    #[error("no automaton for predicate `{0}`")]
    MissingAutomaton(String),
    #[error("model does not interpret constructor `{0}`")]
    MissingConstructor(String),
    #[error("model has no domain for sort `{0}`")]
    MissingSort(String),
    #[error("clause {0} still has existential variables")]
    NotSkolemized(usize),
}

/// Bottom-up transitions shared by all automata built from one model. The
/// states of a sort are `0..states[sort]`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TransitionTable {
    pub states: IndexMap<String, usize>,
    /// Constructor name to (argument sorts, result sort).
    pub constructors: IndexMap<String, (Vec<String>, String)>,
    /// Per constructor, argument states to result state.
    pub rules: BTreeMap<String, BTreeMap<Vec<usize>, usize>>,
}

impl TransitionTable {
    /// Whether every constructor has a rule for every tuple of argument
    /// states.
    pub fn is_complete(&self) -> bool {
        self.constructors.iter().all(|(c, (args, _))| {
            let sizes: Vec<usize> = args
                .iter()
                .map(|s| self.states.get(s).copied().unwrap_or(0))
                .collect();
            tuples_over(&sizes)
                .into_iter()
                .all(|states| self.step(c, &states).is_some())
        })
    }

    pub fn step(&self, constructor: &str, states: &[usize]) -> Option<usize> {
        self.rules.get(constructor)?.get(states).copied()
    }

    /// Adds a rule, returning the previous target for the same left-hand
    /// side if there was one.
    pub fn insert_rule(&mut self, constructor: &str, states: Vec<usize>, target: usize) -> Option<usize> {
        self.rules
            .entry(constructor.to_string())
            .or_default()
            .insert(states, target)
    }

    /// The state reached by `t`, or `None` if evaluation gets stuck (no rule,
    /// a variable, or a non-constructor symbol).
    pub fn run(&self, t: &Term) -> Option<usize> {
        match t {
            Term::App(c, args) => {
                let states = args.iter().map(|a| self.run(a)).collect::<Option<Vec<_>>>()?;
                self.step(c, &states)
            }
            _ => None,
        }
    }

    /// A signature with the table's sorts and constructors, used to
    /// enumerate terms over the automaton's alphabet.
    pub fn signature(&self) -> Signature {
        let mut sig = Signature::new();
        for s in self.states.keys() {
            sig.add_sort(s).expect("distinct sorts");
        }
        for (c, (args, result)) in &self.constructors {
            sig.add_constructor(c, args.clone(), result)
                .expect("constructor over declared sorts");
        }
        sig
    }
}

/// A deterministic bottom-up tree automaton over tuples: a tuple of terms is
/// accepted when the tuple of states they reach is final.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeAutomaton {
    pub predicate: String,
    pub sorts: Vec<String>,
    pub table: Arc<TransitionTable>,
    pub finals: BTreeSet<Vec<usize>>,
}

impl TreeAutomaton {
    /// A stuck component rejects the tuple.
    pub fn accepts(&self, tuple: &[Term]) -> bool {
        if tuple.len() != self.sorts.len() {
            return false;
        }
        match tuple.iter().map(|t| self.table.run(t)).collect::<Option<Vec<_>>>() {
            Some(states) => self.finals.contains(&states),
            None => false,
        }
    }

    /// Accepted tuples whose components have height at most `max_height`,
    /// in enumeration order (per component, lexicographic over positions).
    pub fn enumerate_accepted(&self, max_height: usize) -> Vec<Vec<Term>> {
        if max_height == 0 {
            return Vec::new();
        }
        let terms = GroundTerms::new(&self.table.signature(), max_height);
        let columns: Vec<&[Term]> = self.sorts.iter().map(|s| terms.upto(s, max_height)).collect();
        let sizes: Vec<usize> = columns.iter().map(|c| c.len()).collect();
        tuples_over(&sizes)
            .into_iter()
            .map(|idx| idx.iter().zip(&columns).map(|(&i, c)| c[i].clone()).collect::<Vec<_>>())
            .filter(|tuple| self.accepts(tuple))
            .collect()
    }
}

/// One automaton per predicate sharing the model's constructor tables as
/// transitions; the final states of `P` are the model's table for `P`.
/// Generated relations (disequality, selector and tester encodings) are
/// skipped unless `include_generated` is set. Skolem functions never become
/// transitions.
pub fn build_automata(
    model: &FiniteModel,
    sig: &Signature,
    include_generated: bool,
) -> Result<IndexMap<String, TreeAutomaton>, AutomataError> {
    let mut table = TransitionTable::default();
    for sort in sig.sorts() {
        let k = model
            .domains
            .get(sort)
            .copied()
            .ok_or_else(|| AutomataError::MissingSort(sort.to_string()))?;
        table.states.insert(sort.to_string(), k);
    }
    for (c, decl) in sig.constructors() {
        let f = model
            .functions
            .get(c)
            .ok_or_else(|| AutomataError::MissingConstructor(c.to_string()))?;
        table
            .constructors
            .insert(c.to_string(), (decl.args.clone(), decl.result.clone()));
        let sizes: Vec<usize> = decl.args.iter().map(|s| table.states[s.as_str()]).collect();
        for (row, &v) in tuples_over(&sizes).into_iter().zip(&f.values) {
            table.insert_rule(c, row, v);
        }
    }
    let table = Arc::new(table);
    let mut out = IndexMap::new();
    for (p, decl) in sig.predicates() {
        if !include_generated && decl.origin != PredicateOrigin::User {
            continue;
        }
        let finals = model
            .predicates
            .get(p)
            .map(|t| t.tuples.clone())
            .unwrap_or_default();
        out.insert(
            p.to_string(),
            TreeAutomaton {
                predicate: p.to_string(),
                sorts: decl.args.clone(),
                table: Arc::clone(&table),
                finals,
            },
        );
    }
    Ok(out)
}
