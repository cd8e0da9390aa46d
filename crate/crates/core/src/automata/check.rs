//! Bounded cross-checks of automata against the model they came from and
//! against the clause system they are meant to satisfy.

use std::fmt;
use std::sync::Arc;

use indexmap::IndexMap;

use super::automaton::{AutomataError, TransitionTable, TreeAutomaton};
use crate::ir::{
    count_ground_terms, ChcSystem, Clause, Formula, GroundTerms, Head, Literal, Signature,
    Substitution, Term,
};
use crate::model::{tuples_over, FiniteModel};
use crate::preprocess::nnf;

/// Largest number of tuples `theorem1_check` enumerates per predicate.
pub const THEOREM1_TUPLE_CAP: u128 = 20_000;

/// Largest number of instances `check_herbrand_model` evaluates per clause.
pub const HERBRAND_INSTANCE_CAP: u128 = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Theorem1Outcome {
    Ok,
    Mismatch { predicate: String, tuple: Vec<Term> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Theorem1Report {
    pub requested_height: usize,
    /// Height actually enumerated per predicate after applying the tuple cap.
    pub effective_height: IndexMap<String, usize>,
    pub outcome: Theorem1Outcome,
}

impl Theorem1Report {
    pub fn is_ok(&self) -> bool {
        self.outcome == Theorem1Outcome::Ok
    }
}

/// Evaluates a ground constructor term through the model's tables.
fn eval_in_model(model: &FiniteModel, t: &Term) -> Option<usize> {
    let Term::App(f, args) = t else {
        return None;
    };
    let table = model.functions.get(f)?;
    let mut row = 0;
    for (a, sort) in args.iter().zip(&table.args) {
        row = row * model.domains.get(sort)? + eval_in_model(model, a)?;
    }
    table.values.get(row).copied()
}

/// Checks that each automaton accepts exactly the tuples whose values in the
/// model lie in the predicate's table, over all tuples of terms with height
/// at most `max_height`. The bound shrinks per predicate until the tuple
/// count fits [`THEOREM1_TUPLE_CAP`].
pub fn theorem1_check(
    model: &FiniteModel,
    automata: &IndexMap<String, TreeAutomaton>,
    sig: &Signature,
    max_height: usize,
) -> Theorem1Report {
    let mut report = Theorem1Report {
        requested_height: max_height,
        effective_height: IndexMap::new(),
        outcome: Theorem1Outcome::Ok,
    };
    let tuple_count = |sorts: &[String], h: usize| -> u128 {
        let counts = count_ground_terms(sig, h);
        sorts
            .iter()
            .map(|s| counts.get(s.as_str()).copied().unwrap_or(0))
            .fold(1u128, |acc, n| acc.saturating_mul(n))
    };
    for (p, a) in automata {
        let mut h = max_height.max(1);
        while h > 1 && tuple_count(&a.sorts, h) > THEOREM1_TUPLE_CAP {
            h -= 1;
        }
        report.effective_height.insert(p.clone(), h);
        let terms = GroundTerms::new(sig, h);
        let columns: Vec<&[Term]> = a.sorts.iter().map(|s| terms.upto(s, h)).collect();
        let sizes: Vec<usize> = columns.iter().map(|c| c.len()).collect();
        for idx in tuples_over(&sizes) {
            let tuple: Vec<Term> = idx.iter().zip(&columns).map(|(&i, c)| c[i].clone()).collect();
            let values: Option<Vec<usize>> = tuple.iter().map(|t| eval_in_model(model, t)).collect();
            let in_model = values.is_some_and(|v| model.holds(p, &v));
            if a.accepts(&tuple) != in_model {
                report.outcome = Theorem1Outcome::Mismatch {
                    predicate: p.clone(),
                    tuple,
                };
                return report;
            }
        }
    }
    report
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClauseCheck {
    pub index: usize,
    pub clause: String,
    /// Height the clause was actually checked at.
    pub height: usize,
    pub instances: u64,
    /// First falsifying assignment of the clause's universals, if any.
    pub failure: Option<Vec<(String, Term)>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HerbrandCheckReport {
    pub height: usize,
    pub clauses: Vec<ClauseCheck>,
}

impl HerbrandCheckReport {
    pub fn passed(&self) -> bool {
        self.clauses.iter().all(|c| c.failure.is_none())
    }

    /// Smallest height any clause was checked at.
    pub fn effective_height(&self) -> usize {
        self.clauses.iter().map(|c| c.height).min().unwrap_or(self.height)
    }

    pub fn first_failure(&self) -> Option<&ClauseCheck> {
        self.clauses.iter().find(|c| c.failure.is_some())
    }
}

impl fmt::Display for HerbrandCheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "herbrand check up to height {}", self.height)?;
        for c in &self.clauses {
            match &c.failure {
                None => writeln!(
                    f,
                    "  [{}] pass at height {} ({} instances)",
                    c.index, c.height, c.instances
                )?,
                Some(assignment) => {
                    let parts: Vec<String> =
                        assignment.iter().map(|(v, t)| format!("{v}:={t}")).collect();
                    writeln!(f, "  [{}] FAIL with {{{}}}: {}", c.index, parts.join(", "), c.clause)?
                }
            }
        }
        Ok(())
    }
}

/// Resolves selectors in a ground term. `None` when a selector is applied
/// to a term built with a different constructor.
fn select(sig: &Signature, t: &Term) -> Option<Term> {
    match t {
        Term::Var(_) => None,
        Term::App(f, args) => Some(Term::App(
            f.clone(),
            args.iter().map(|a| select(sig, a)).collect::<Option<_>>()?,
        )),
        Term::Select(s, inner) => {
            let decl = sig.selector(s)?;
            match select(sig, inner)? {
                Term::App(c, mut args) if c == decl.constructor => Some(args.swap_remove(decl.index)),
                _ => None,
            }
        }
    }
}

/// Literals mentioning an undefined selection are false, matching the
/// relational encoding where the selector atom has no fact.
fn literal_holds(sig: &Signature, l: &Literal) -> bool {
    match l {
        Literal::Eq(a, b) => matches!((select(sig, a), select(sig, b)), (Some(x), Some(y)) if x == y),
        Literal::Diseq(a, b) => matches!((select(sig, a), select(sig, b)), (Some(x), Some(y)) if x != y),
        Literal::Tester { constructor, term } => {
            matches!(select(sig, term), Some(Term::App(c, _)) if c == *constructor)
        }
    }
}

fn formula_holds(sig: &Signature, f: &Formula) -> bool {
    match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Lit(l) => literal_holds(sig, l),
        Formula::Not(g) => !formula_holds(sig, g),
        Formula::And(gs) => gs.iter().all(|g| formula_holds(sig, g)),
        Formula::Or(gs) => gs.iter().any(|g| formula_holds(sig, g)),
    }
}

struct Herbrand<'a> {
    sig: &'a Signature,
    automata: &'a IndexMap<String, TreeAutomaton>,
    terms: &'a GroundTerms,
    height: usize,
}

impl Herbrand<'_> {
    fn atom_holds(&self, a: &crate::ir::Atom) -> Result<Option<bool>, AutomataError> {
        let automaton = self
            .automata
            .get(&a.predicate)
            .ok_or_else(|| AutomataError::MissingAutomaton(a.predicate.clone()))?;
        let args: Option<Vec<Term>> = a.args.iter().map(|t| select(self.sig, t)).collect();
        Ok(args.map(|args| automaton.accepts(&args)))
    }

    /// A ground instance (no Skolem symbols left) holds.
    fn ground_holds(&self, c: &Clause) -> Result<bool, AutomataError> {
        if !formula_holds(self.sig, &nnf(&c.constraint, self.sig)) {
            return Ok(true);
        }
        for a in &c.body {
            if self.atom_holds(a)? != Some(true) {
                return Ok(true);
            }
        }
        match &c.head {
            Head::False => Ok(false),
            // An undefined selection in the head makes the clause vacuous.
            Head::Atom(a) => Ok(self.atom_holds(a)?.unwrap_or(true)),
        }
    }

    /// Some choice of witnesses of height at most the bound for the Skolem
    /// applications makes the instance hold.
    fn holds(&self, c: &Clause) -> Result<bool, AutomataError> {
        let Some(app) = innermost_skolem(self.sig, c) else {
            return self.ground_holds(c);
        };
        let sort = app.sort(self.sig).expect("declared Skolem").to_string();
        for w in self.terms.upto(&sort, self.height) {
            let mut replace = |t: &Term| replace_term(t, &app, w);
            let instance = Clause {
                constraint: c.constraint.map_terms(&mut replace),
                body: c
                    .body
                    .iter()
                    .map(|a| crate::ir::Atom::new(a.predicate.clone(), a.args.iter().map(&mut replace).collect()))
                    .collect(),
                head: match &c.head {
                    Head::False => Head::False,
                    Head::Atom(a) => Head::Atom(crate::ir::Atom::new(
                        a.predicate.clone(),
                        a.args.iter().map(&mut replace).collect(),
                    )),
                },
                ..c.clone()
            };
            if self.holds(&instance)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

fn replace_term(t: &Term, from: &Term, to: &Term) -> Term {
    if t == from {
        return to.clone();
    }
    match t {
        Term::Var(_) => t.clone(),
        Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| replace_term(a, from, to)).collect()),
        Term::Select(s, inner) => Term::Select(s.clone(), Box::new(replace_term(inner, from, to))),
    }
}

/// A Skolem application whose arguments are free of Skolem symbols.
fn innermost_skolem(sig: &Signature, c: &Clause) -> Option<Term> {
    fn find(sig: &Signature, t: &Term) -> Option<Term> {
        match t {
            Term::Var(_) => None,
            Term::Select(_, inner) => find(sig, inner),
            Term::App(f, args) => args
                .iter()
                .find_map(|a| find(sig, a))
                .or_else(|| sig.is_skolem(f).then(|| t.clone())),
        }
    }
    c.terms().into_iter().find_map(|t| find(sig, t))
}

fn mentions_skolem_or_selector(sig: &Signature, t: &Term) -> bool {
    match t {
        Term::Var(_) => false,
        Term::Select(..) => true,
        Term::App(f, args) => {
            sig.is_skolem(f) || args.iter().any(|a| mentions_skolem_or_selector(sig, a))
        }
    }
}

/// Syntactic equality of two terms after replacing variables by their
/// (ground) values.
fn same_instance<'a>(a: &'a Term, b: &'a Term, env: &dyn Fn(&str) -> &'a Term) -> bool {
    let a = match a {
        Term::Var(v) => env(&v.name),
        _ => a,
    };
    let b = match b {
        Term::Var(v) => env(&v.name),
        _ => b,
    };
    match (a, b) {
        (Term::App(f, xs), Term::App(g, ys)) => {
            f == g && xs.iter().zip(ys).all(|(x, y)| same_instance(x, y, env))
        }
        _ => false,
    }
}

/// Evaluates a selector- and Skolem-free constraint under a variable
/// assignment.
fn constraint_holds<'a>(f: &'a Formula, env: &dyn Fn(&str) -> &'a Term) -> bool {
    match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Lit(Literal::Eq(a, b)) => same_instance(a, b, env),
        Formula::Lit(Literal::Diseq(a, b)) => !same_instance(a, b, env),
        Formula::Lit(Literal::Tester { constructor, term }) => {
            let t = match term {
                Term::Var(v) => env(&v.name),
                _ => term,
            };
            matches!(t, Term::App(c, _) if c == constructor)
        }
        Formula::Not(g) => !constraint_holds(g, env),
        Formula::And(gs) => gs.iter().all(|g| constraint_holds(g, env)),
        Formula::Or(gs) => gs.iter().any(|g| constraint_holds(g, env)),
    }
}

/// States of the enumerated ground terms under one transition table, so
/// that atoms over variables are evaluated without rebuilding terms.
struct StateCache {
    table: Arc<TransitionTable>,
    per_sort: IndexMap<String, Vec<Option<usize>>>,
}

impl StateCache {
    fn new(table: Arc<TransitionTable>, sig: &Signature, terms: &GroundTerms, h: usize) -> Self {
        let per_sort = sig
            .sorts()
            .map(|s| (s.to_string(), terms.upto(s, h).iter().map(|t| table.run(t)).collect()))
            .collect();
        StateCache { table, per_sort }
    }

    /// `vars[i]` is the sort and the index of the term assigned to variable i.
    fn state_of(&self, t: &Term, var_index: &IndexMap<String, usize>, vars: &[(&str, usize)]) -> Option<usize> {
        match t {
            Term::Var(v) => {
                let (sort, i) = vars[*var_index.get(&v.name)?];
                self.per_sort.get(sort)?[i]
            }
            Term::App(c, args) => {
                let states = args
                    .iter()
                    .map(|a| self.state_of(a, var_index, vars))
                    .collect::<Option<Vec<_>>>()?;
                self.table.step(c, &states)
            }
            Term::Select(..) => None,
        }
    }
}

/// Odometer step over column indices; true once every combination is done.
fn advance(idx: &mut [usize], columns: &[&[Term]]) -> bool {
    for (i, col) in idx.iter_mut().zip(columns) {
        *i += 1;
        if *i < col.len() {
            return false;
        }
        *i = 0;
    }
    true
}

/// Evaluates every clause of `original` (after Skolemization, before
/// preprocessing) in the Herbrand interpretation given by the automata, over
/// all assignments of ground terms of height at most `max_height`. Clauses
/// whose instance count would exceed [`HERBRAND_INSTANCE_CAP`] are checked
/// at the largest smaller height that fits; see [`ClauseCheck::height`].
/// Disequalities, testers and selectors get their syntactic meaning. A
/// Skolem application counts as satisfied when some ground term of height at
/// most `max_height` serves as its witness.
pub fn check_herbrand_model(
    original: &ChcSystem,
    automata: &IndexMap<String, TreeAutomaton>,
    max_height: usize,
) -> Result<HerbrandCheckReport, AutomataError> {
    let sig = &original.signature;
    let h = max_height.max(1);
    let terms = GroundTerms::new(sig, h);
    let checker = Herbrand {
        sig,
        automata,
        terms: &terms,
        height: h,
    };
    // One cache per distinct transition table.
    let mut caches: Vec<StateCache> = Vec::new();
    let mut cache_of: IndexMap<String, usize> = IndexMap::new();
    for (p, a) in automata {
        let i = match caches.iter().position(|c| Arc::ptr_eq(&c.table, &a.table)) {
            Some(i) => i,
            None => {
                caches.push(StateCache::new(Arc::clone(&a.table), sig, &terms, h));
                caches.len() - 1
            }
        };
        cache_of.insert(p.clone(), i);
    }
    let mut report = HerbrandCheckReport {
        height: max_height,
        clauses: Vec::new(),
    };
    for (index, c) in original.clauses.iter().enumerate() {
        if !c.existentials.is_empty() {
            return Err(AutomataError::NotSkolemized(index));
        }
        for a in c.atoms() {
            if !automata.contains_key(&a.predicate) {
                return Err(AutomataError::MissingAutomaton(a.predicate.clone()));
            }
        }
        let constraint = nnf(&c.constraint, sig);
        let slow = c.terms().into_iter().any(|t| mentions_skolem_or_selector(sig, t));
        let normalized = Clause {
            constraint: constraint.clone(),
            ..c.clone()
        };
        let var_index: IndexMap<String, usize> =
            c.universals.keys().enumerate().map(|(i, v)| (v.clone(), i)).collect();
        let sorts: Vec<&str> = c.universals.values().map(String::as_str).collect();
        // Largest height whose instance count fits the cap.
        let count_at = |k: usize| -> u128 {
            sorts.iter().map(|s| terms.upto(s, k).len() as u128).product()
        };
        let clause_height = (1..=h)
            .rev()
            .find(|&k| count_at(k) <= HERBRAND_INSTANCE_CAP)
            .unwrap_or(1);
        let columns: Vec<&[Term]> = sorts.iter().map(|s| terms.upto(s, clause_height)).collect();
        let mut check = ClauseCheck {
            index,
            clause: c.to_string(),
            height: clause_height,
            instances: 0,
            failure: None,
        };
        let mut idx = vec![0usize; columns.len()];
        let mut exhausted = columns.iter().any(|col| col.is_empty());
        while !exhausted {
            check.instances += 1;
            let sub = || -> Substitution {
                var_index
                    .iter()
                    .map(|(v, &i)| (v.clone(), columns[i][idx[i]].clone()))
                    .collect()
            };
            let holds = if slow {
                checker.holds(&normalized.substitute(&sub()))?
            } else {
                let vars: Vec<(&str, usize)> = sorts.iter().copied().zip(idx.iter().copied()).collect();
                let accepted = |a: &crate::ir::Atom| {
                    let cache = &caches[cache_of[&a.predicate]];
                    a.args
                        .iter()
                        .map(|t| cache.state_of(t, &var_index, &vars))
                        .collect::<Option<Vec<_>>>()
                        .is_some_and(|states| automata[&a.predicate].finals.contains(&states))
                };
                let lookup = |name: &str| &columns[var_index[name]][idx[var_index[name]]];
                let body = constraint_holds(&constraint, &lookup) && c.body.iter().all(accepted);
                !body
                    || match &c.head {
                        Head::False => false,
                        Head::Atom(a) => accepted(a),
                    }
            };
            if !holds {
                let sub = sub();
                check.failure = Some(
                    c.universals
                        .keys()
                        .map(|v| (v.clone(), sub[v.as_str()].clone()))
                        .collect(),
                );
                break;
            }
            exhausted = advance(&mut idx, &columns);
        }
        report.clauses.push(check);
    }
    Ok(report)
}
