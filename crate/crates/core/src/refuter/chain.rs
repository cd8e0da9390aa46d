//! Height-bounded semi-naive forward chaining.

use std::cell::Cell;
use std::cmp::Ordering;
use std::collections::HashMap;
use std::ops::ControlFlow;
use std::time::Instant;

use indexmap::IndexMap;
use tracing::debug;

use super::derivation::{Derivation, Step};
use crate::ir::{
    term_height, Atom, ChcSystem, Clause, Formula, GroundTerms, Head, Literal, Signature,
    Substitution, Term,
};

/// Why a fact holds: the clause, the values of its universals, and the facts
/// matched by its body atoms (in body order).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Justification {
    pub clause: usize,
    pub assignment: Vec<(String, Term)>,
    pub premises: Vec<usize>,
}

/// Derived ground facts in derivation order, each with one justification.
#[derive(Debug, Clone, Default)]
pub struct FactBase {
    facts: Vec<(Atom, Justification)>,
    index: HashMap<Atom, usize>,
    by_predicate: IndexMap<String, Vec<usize>>,
    /// Per predicate and argument position, the facts with a given argument.
    by_argument: HashMap<String, Vec<HashMap<Term, Vec<usize>>>>,
    max_height: usize,
    saturated: bool,
    stopped_by: Option<LimitHit>,
}

impl FactBase {
    pub fn len(&self) -> usize {
        self.facts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }

    pub fn max_height(&self) -> usize {
        self.max_height
    }

    /// False when a resource limit stopped chaining before the fixpoint.
    pub fn is_saturated(&self) -> bool {
        self.saturated
    }

    /// Which limit stopped chaining, if one did.
    pub fn stopped_by(&self) -> Option<LimitHit> {
        self.stopped_by
    }

    pub fn contains(&self, fact: &Atom) -> bool {
        self.index.contains_key(fact)
    }

    pub fn id_of(&self, fact: &Atom) -> Option<usize> {
        self.index.get(fact).copied()
    }

    pub fn fact(&self, id: usize) -> &Atom {
        &self.facts[id].0
    }

    pub fn justification(&self, id: usize) -> &Justification {
        &self.facts[id].1
    }

    /// Facts in derivation order.
    pub fn iter(&self) -> impl Iterator<Item = &Atom> {
        self.facts.iter().map(|(a, _)| a)
    }

    /// Argument tuples derived for `predicate`, in derivation order.
    pub fn tuples(&self, predicate: &str) -> Vec<&[Term]> {
        self.by_predicate
            .get(predicate)
            .map(|ids| ids.iter().map(|&i| self.facts[i].0.args.as_slice()).collect())
            .unwrap_or_default()
    }

    fn insert(&mut self, fact: Atom, why: Justification) -> bool {
        if self.index.contains_key(&fact) {
            return false;
        }
        let id = self.facts.len();
        self.index.insert(fact.clone(), id);
        self.by_predicate
            .entry(fact.predicate.clone())
            .or_default()
            .push(id);
        let positions = self
            .by_argument
            .entry(fact.predicate.clone())
            .or_insert_with(|| vec![HashMap::new(); fact.args.len()]);
        for (slot, arg) in positions.iter_mut().zip(&fact.args) {
            slot.entry(arg.clone()).or_default().push(id);
        }
        self.facts.push((fact, why));
        true
    }
}

/// Extends `sub` so that `pattern` instantiates to `ground`.
fn match_term(pattern: &Term, ground: &Term, sub: &mut Substitution) -> bool {
    match (pattern, ground) {
        (Term::Var(v), _) => match sub.get(&v.name) {
            Some(bound) => bound == ground,
            None => {
                sub.insert(v.name.clone(), ground.clone());
                true
            }
        },
        (Term::App(f, xs), Term::App(g, ys)) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| match_term(x, y, sub))
        }
        _ => false,
    }
}

fn match_atom(pattern: &Atom, fact: &Atom, sub: &Substitution) -> Option<Substitution> {
    if pattern.predicate != fact.predicate || pattern.args.len() != fact.args.len() {
        return None;
    }
    let mut sub = sub.clone();
    pattern
        .args
        .iter()
        .zip(&fact.args)
        .all(|(p, g)| match_term(p, g, &mut sub))
        .then_some(sub)
}

/// Fact arguments must be constructor terms within the height bound. Facts
/// mentioning Skolem functions are dropped, which only weakens refutation.
fn admissible(atom: &Atom, sig: &Signature, h: usize) -> bool {
    fn constructor_only(t: &Term, sig: &Signature) -> bool {
        match t {
            Term::App(c, args) => sig.is_constructor(c) && args.iter().all(|a| constructor_only(a, sig)),
            _ => false,
        }
    }
    atom.args
        .iter()
        .all(|t| constructor_only(t, sig) && term_height(t).is_ok_and(|k| k <= h))
}

/// Syntactic truth of a ground constraint over constructor terms. Anything
/// that cannot be decided (selectors, Skolem terms) counts as false.
pub(crate) fn ground_constraint_holds(f: &Formula, sig: &Signature) -> bool {
    fn decidable(t: &Term, sig: &Signature) -> bool {
        match t {
            Term::App(c, args) => sig.is_constructor(c) && args.iter().all(|a| decidable(a, sig)),
            _ => false,
        }
    }
    match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Lit(lit) => match lit {
            Literal::Eq(a, b) => decidable(a, sig) && decidable(b, sig) && a == b,
            Literal::Diseq(a, b) => decidable(a, sig) && decidable(b, sig) && a != b,
            Literal::Tester { constructor, term } => {
                decidable(term, sig) && matches!(term, Term::App(c, _) if c == constructor)
            }
        },
        Formula::Not(g) => {
            let mut terms_ok = true;
            g.walk_literals(&mut |l| {
                let ts: Vec<&Term> = match l {
                    Literal::Eq(a, b) | Literal::Diseq(a, b) => vec![a, b],
                    Literal::Tester { term, .. } => vec![term],
                };
                terms_ok &= ts.iter().all(|t| decidable(t, sig));
            });
            terms_ok && !ground_constraint_holds(g, sig)
        }
        Formula::And(parts) => parts.iter().all(|g| ground_constraint_holds(g, sig)),
        Formula::Or(parts) => parts.iter().any(|g| ground_constraint_holds(g, sig)),
    }
}

/// Number of constructors above the deepest occurrence of `var` in `args`.
fn deepest_occurrence(args: &[Term], var: &str) -> Option<usize> {
    fn walk(t: &Term, var: &str, depth: usize) -> Option<usize> {
        match t {
            Term::Var(v) => (v.name == var).then_some(depth),
            Term::App(_, xs) => xs.iter().filter_map(|x| walk(x, var, depth + 1)).max(),
            Term::Select(_, x) => walk(x, var, depth + 1),
        }
    }
    args.iter().filter_map(|t| walk(t, var, 0)).max()
}

/// Which facts each body position may use in one semi-naive step.
#[derive(Clone, Copy)]
enum Window {
    /// Facts with id below the bound.
    Below(usize),
    /// Facts with id in `[start, end)`.
    Between(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitHit {
    Facts,
    Deadline,
}

/// Resource limits for saturation. Hitting either one stops chaining early;
/// the facts derived so far are still sound.
#[derive(Debug, Clone, Copy)]
pub struct ChainLimits {
    pub max_facts: usize,
    pub deadline: Option<Instant>,
}

impl Default for ChainLimits {
    fn default() -> Self {
        ChainLimits {
            max_facts: 200_000,
            deadline: None,
        }
    }
}

struct Chainer<'a> {
    system: &'a ChcSystem,
    terms: GroundTerms,
    h: usize,
    limits: ChainLimits,
    ticks: Cell<u64>,
}

impl<'a> Chainer<'a> {
    fn new(system: &'a ChcSystem, max_height: usize, limits: ChainLimits) -> Self {
        let h = max_height.max(1);
        Chainer {
            system,
            terms: GroundTerms::new(&system.signature, h),
            h,
            limits,
            ticks: Cell::new(0),
        }
    }

    fn out_of_time(&self) -> bool {
        let t = self.ticks.get() + 1;
        self.ticks.set(t);
        t.is_multiple_of(1024) && self.limits.deadline.is_some_and(|d| Instant::now() >= d)
    }

    /// Calls `f` for every way to match `body` against facts within the
    /// windows, in deterministic order, with the substitution and premise ids.
    fn matches(
        &self,
        facts: &FactBase,
        body: &[Atom],
        windows: &[Window],
        sub: &Substitution,
        premises: &mut Vec<usize>,
        f: &mut dyn FnMut(&Substitution, &[usize]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        let Some((atom, rest)) = body.split_first() else {
            return f(sub, premises);
        };
        let (start, end) = match windows[0] {
            Window::Below(end) => (0, end),
            Window::Between(s, e) => (s, e),
        };
        let Some(mut ids) = facts.by_predicate.get(&atom.predicate).map(Vec::as_slice) else {
            return ControlFlow::Continue(());
        };
        // Narrow to facts agreeing on the first argument already fixed by
        // the substitution.
        for (pos, pattern) in atom.args.iter().enumerate() {
            let instance = pattern.substitute(sub);
            if instance.is_ground() {
                ids = facts.by_argument[&atom.predicate][pos]
                    .get(&instance)
                    .map_or(&[], Vec::as_slice);
                break;
            }
        }
        let lo = ids.partition_point(|&i| i < start);
        let hi = ids.partition_point(|&i| i < end);
        for &id in &ids[lo..hi] {
            if self.out_of_time() {
                return ControlFlow::Break(());
            }
            if let Some(next) = match_atom(atom, facts.fact(id), sub) {
                premises.push(id);
                let flow = self.matches(facts, rest, &windows[1..], &next, premises, f);
                premises.pop();
                flow?;
            }
        }
        ControlFlow::Continue(())
    }

    /// Calls `f` for every extension of `sub` that gives the clause's
    /// remaining universals terms of height at most the bound. A variable
    /// occurring under `d` constructors in the head only gets terms of height
    /// at most `h - d`, since anything taller makes the fact inadmissible.
    fn completions(
        &self,
        clause: &Clause,
        sub: &Substitution,
        f: &mut dyn FnMut(&Substitution) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        let mut free: Vec<(&String, &[Term])> = Vec::new();
        for (v, sort) in &clause.universals {
            if sub.contains_key(v) {
                continue;
            }
            let depth = clause.head.atom().and_then(|a| deepest_occurrence(&a.args, v));
            let bound = match depth {
                Some(d) if d >= self.h => return ControlFlow::Continue(()),
                Some(d) => self.h - d,
                None => self.h,
            };
            let values = self.terms.upto(sort, bound);
            if values.is_empty() {
                return ControlFlow::Continue(());
            }
            free.push((v, values));
        }
        let mut full = sub.clone();
        let mut digits = vec![0usize; free.len()];
        loop {
            for ((v, ts), &d) in free.iter().zip(&digits) {
                full.insert((*v).clone(), ts[d].clone());
            }
            if self.out_of_time() {
                return ControlFlow::Break(());
            }
            f(&full)?;
            let mut k = 0;
            loop {
                if k == digits.len() {
                    return ControlFlow::Continue(());
                }
                digits[k] += 1;
                if digits[k] < free[k].1.len() {
                    break;
                }
                digits[k] = 0;
                k += 1;
            }
        }
    }

    fn constraint_ok(&self, clause: &Clause, sub: &Substitution) -> bool {
        clause.constraint.is_true()
            || ground_constraint_holds(&clause.constraint.substitute(sub), &self.system.signature)
    }

    fn justification(clause_index: usize, clause: &Clause, sub: &Substitution, premises: Vec<usize>) -> Justification {
        Justification {
            clause: clause_index,
            assignment: clause
                .universals
                .keys()
                .filter_map(|v| sub.get(v).map(|t| (v.clone(), t.clone())))
                .collect(),
            premises,
        }
    }

    /// Fires one clause over the given windows, inserting new facts.
    fn fire(
        &self,
        facts: &mut FactBase,
        ci: usize,
        clause: &Clause,
        head: &Atom,
        windows: &[Window],
    ) -> ControlFlow<()> {
        let mut new = Vec::new();
        let max_facts = self.limits.max_facts;
        let known = facts.len();
        let flow = {
            let snapshot: &FactBase = facts;
            self.matches(snapshot, &clause.body, windows, &Substitution::new(), &mut Vec::new(), &mut |sub, premises| {
                self.completions(clause, sub, &mut |full| {
                    if !self.constraint_ok(clause, full) {
                        return ControlFlow::Continue(());
                    }
                    let fact = head.substitute(full);
                    if admissible(&fact, &self.system.signature, self.h) && !snapshot.contains(&fact) {
                        new.push((fact, Self::justification(ci, clause, full, premises.to_vec())));
                        if known + new.len() >= max_facts {
                            return ControlFlow::Break(());
                        }
                    }
                    ControlFlow::Continue(())
                })
            })
        };
        for (fact, why) in new {
            facts.insert(fact, why);
        }
        flow
    }

    /// Runs rounds to the fixpoint. After every round `stop` sees the facts
    /// and the id range added by that round; returning true ends chaining.
    fn saturate(&self, stop: &mut dyn FnMut(&FactBase, (usize, usize)) -> bool) -> FactBase {
        let mut facts = FactBase {
            max_height: self.h,
            ..FactBase::default()
        };
        let mut round = 0;
        let mut delta = (0, 0);
        loop {
            let before = facts.len();
            for (ci, clause) in self.system.definite() {
                let Head::Atom(head) = &clause.head else {
                    continue;
                };
                let mut flow = ControlFlow::Continue(());
                if clause.body.is_empty() {
                    if round == 0 {
                        flow = self.fire(&mut facts, ci, clause, head, &[]);
                    }
                } else {
                    // Position i takes a fact from the last round's delta,
                    // earlier positions older facts, later positions any fact
                    // known at the start of this round.
                    for i in 0..clause.body.len() {
                        let windows: Vec<Window> = (0..clause.body.len())
                            .map(|j| match j.cmp(&i) {
                                Ordering::Less => Window::Below(delta.0),
                                Ordering::Equal => Window::Between(delta.0, delta.1),
                                Ordering::Greater => Window::Below(delta.1),
                            })
                            .collect();
                        flow = self.fire(&mut facts, ci, clause, head, &windows);
                        if flow.is_break() {
                            break;
                        }
                    }
                }
                if flow.is_break() {
                    let hit = if facts.len() >= self.limits.max_facts {
                        LimitHit::Facts
                    } else {
                        LimitHit::Deadline
                    };
                    debug!(facts = facts.len(), ?hit, "chaining stopped at a resource limit");
                    facts.stopped_by = Some(hit);
                    return facts;
                }
            }
            debug!(round, new = facts.len() - before, "chaining round");
            if stop(&facts, (before, facts.len())) {
                return facts;
            }
            if round > 0 && facts.len() == before {
                break;
            }
            delta = (before, facts.len());
            round += 1;
        }
        facts.saturated = true;
        facts
    }
}

/// The least set of ground facts closed under the definite clauses, where
/// every variable and every fact argument is a ground term of height at most
/// `max_height`. Query clauses are ignored.
pub fn least_model_facts(system: &ChcSystem, max_height: usize) -> FactBase {
    least_model_facts_with(system, max_height, ChainLimits::default())
}

/// [`least_model_facts`] under explicit limits; check
/// [`FactBase::is_saturated`] to see whether they were hit.
pub fn least_model_facts_with(system: &ChcSystem, max_height: usize, limits: ChainLimits) -> FactBase {
    Chainer::new(system, max_height, limits).saturate(&mut |_, _| false)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RefuteOutcome {
    Refuted(Derivation),
    /// Saturated at the bound and no query fires. Not a proof of
    /// satisfiability.
    NotRefutedAtThisBound,
    /// A resource limit stopped saturation before any query fired.
    GaveUp(LimitHit),
}

/// Saturates the definite clauses at the bound and looks for a query clause
/// whose body is matched by derived facts. The first such query (by clause
/// index, then match order) becomes the root of the returned derivation.
pub fn bounded_refute(system: &ChcSystem, max_height: usize) -> RefuteOutcome {
    bounded_refute_with(system, max_height, ChainLimits::default())
}

pub fn bounded_refute_with(system: &ChcSystem, max_height: usize, limits: ChainLimits) -> RefuteOutcome {
    let chainer = Chainer::new(system, max_height, limits);
    let mut root = None;
    let facts = chainer.saturate(&mut |facts, delta| {
        root = chainer.fire_queries(facts, delta);
        root.is_some()
    });
    if root.is_none() && !facts.is_saturated() {
        // A partial fact base can still refute soundly.
        let unlimited = Chainer::new(system, max_height, ChainLimits { deadline: None, ..limits });
        root = unlimited.fire_queries(&facts, (0, facts.len()));
    }
    match root {
        Some(root) => RefuteOutcome::Refuted(extract_derivation(&facts, root)),
        None if facts.is_saturated() => RefuteOutcome::NotRefutedAtThisBound,
        None => RefuteOutcome::GaveUp(facts.stopped_by().unwrap_or(LimitHit::Deadline)),
    }
}

impl Chainer<'_> {
    /// The first query instance with at least one premise in `delta` (or any
    /// instance when `delta` starts at 0), as the root of a derivation.
    fn fire_queries(&self, facts: &FactBase, delta: (usize, usize)) -> Option<Justification> {
        for (qi, query) in self.system.queries() {
            let n = query.body.len();
            let shapes: Vec<Vec<Window>> = if delta.0 == 0 {
                vec![vec![Window::Below(delta.1); n]]
            } else {
                (0..n)
                    .map(|i| {
                        (0..n)
                            .map(|j| match j.cmp(&i) {
                                Ordering::Less => Window::Below(delta.0),
                                Ordering::Equal => Window::Between(delta.0, delta.1),
                                Ordering::Greater => Window::Below(delta.1),
                            })
                            .collect()
                    })
                    .collect()
            };
            for windows in shapes {
                let mut hit = None;
                let _ = self.matches(facts, &query.body, &windows, &Substitution::new(), &mut Vec::new(), &mut |sub, premises| {
                    self.completions(query, sub, &mut |full| {
                        if self.constraint_ok(query, full) {
                            hit = Some(Self::justification(qi, query, full, premises.to_vec()));
                            return ControlFlow::Break(());
                        }
                        ControlFlow::Continue(())
                    })
                });
                if hit.is_some() {
                    return hit;
                }
            }
        }
        None
    }
}

/// Steps for every fact the root depends on, premises before conclusions.
fn extract_derivation(facts: &FactBase, root: Justification) -> Derivation {
    fn visit(facts: &FactBase, id: usize, step_of: &mut HashMap<usize, usize>, steps: &mut Vec<Step>) -> usize {
        if let Some(&s) = step_of.get(&id) {
            return s;
        }
        let why = facts.justification(id);
        let premises = why
            .premises
            .iter()
            .map(|&p| visit(facts, p, step_of, steps))
            .collect();
        steps.push(Step {
            fact: Some(facts.fact(id).clone()),
            clause: why.clause,
            assignment: why.assignment.clone(),
            premises,
        });
        let s = steps.len() - 1;
        step_of.insert(id, s);
        s
    }
    let mut steps = Vec::new();
    let mut step_of = HashMap::new();
    let premises = root
        .premises
        .iter()
        .map(|&p| visit(facts, p, &mut step_of, &mut steps))
        .collect();
    steps.push(Step {
        fact: None,
        clause: root.clause,
        assignment: root.assignment,
        premises,
    });
    Derivation { steps }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::frontend::load_system;
    use crate::ir::{PredicateOrigin, Var};
    use crate::preprocess::{diseq_rule_system, run_pipeline};
    use crate::refuter::replay_derivation;

    fn nat(k: usize) -> Term {
        (0..k).fold(Term::constant("Z"), |t, _| Term::app("S", vec![t]))
    }

    fn pipelined(text: &str) -> ChcSystem {
        let (sys, _) = load_system(text).unwrap();
        run_pipeline(&sys).unwrap().0
    }

    #[test]
    fn even_facts_at_height_five() {
        let sys = pipelined(fixtures::EVEN);
        let facts = least_model_facts(&sys, 5);
        let got: Vec<Term> = facts.tuples("even").into_iter().map(|t| t[0].clone()).collect();
        assert_eq!(got, vec![nat(0), nat(2), nat(4)]);
    }

    #[test]
    fn no_definite_clauses_gives_no_facts() {
        let mut sig = fixtures::nat_signature();
        sig.add_predicate("p", vec!["Nat".into()], PredicateOrigin::User).unwrap();
        let x = Var::new("x", "Nat");
        let q = Clause::new(
            [x.clone()],
            Formula::True,
            vec![Atom::new("p", vec![Term::Var(x)])],
            Head::False,
        );
        let sys = ChcSystem::new(sig, vec![q]);
        assert!(least_model_facts(&sys, 3).is_empty());
        assert_eq!(bounded_refute(&sys, 3), RefuteOutcome::NotRefutedAtThisBound);
    }

    #[test]
    fn nat_diseq_at_height_three_is_the_six_distinct_pairs() {
        let (sys, names) = diseq_rule_system(&fixtures::nat_signature(), &["Nat".into()]).unwrap();
        let facts = least_model_facts(&sys, 3);
        let mut got: Vec<(Term, Term)> = facts
            .tuples(&names["Nat"])
            .into_iter()
            .map(|t| (t[0].clone(), t[1].clone()))
            .collect();
        got.sort();
        let mut want = Vec::new();
        for a in 0..3 {
            for b in 0..3 {
                if a != b {
                    want.push((nat(a), nat(b)));
                }
            }
        }
        want.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn example3_is_refuted_in_two_steps() {
        let sys = pipelined(fixtures::EXAMPLE3);
        let RefuteOutcome::Refuted(d) = bounded_refute(&sys, 2) else {
            panic!("expected a refutation");
        };
        assert_eq!(d.len(), 2);
        replay_derivation(&sys, &d).unwrap();
        let first = d.steps[0].fact.as_ref().unwrap();
        assert_eq!(first.args, vec![nat(0), nat(1)]);
        assert!(d.to_string().lines().last().unwrap().starts_with("[1] FALSE by clause"));
    }

    #[test]
    fn even_is_not_refuted() {
        let sys = pipelined(fixtures::EVEN);
        assert_eq!(bounded_refute(&sys, 10), RefuteOutcome::NotRefutedAtThisBound);
    }

    #[test]
    fn immediate_contradiction() {
        let mut sig = fixtures::nat_signature();
        sig.add_predicate("P", vec!["Nat".into()], PredicateOrigin::User).unwrap();
        let x = Var::new("x", "Nat");
        let fact = Clause::new([], Formula::True, vec![], Head::Atom(Atom::new("P", vec![nat(0)])));
        let q = Clause::new(
            [x.clone()],
            Formula::True,
            vec![Atom::new("P", vec![Term::Var(x)])],
            Head::False,
        );
        let sys = ChcSystem::new(sig, vec![fact, q]);
        let RefuteOutcome::Refuted(d) = bounded_refute(&sys, 1) else {
            panic!("expected a refutation");
        };
        assert_eq!(d.to_string(), "[0] P(Z) by clause 0 with {} using []\n[1] FALSE by clause 1 with {x:=Z} using [0]\n");
        replay_derivation(&sys, &d).unwrap();
    }

    #[test]
    fn tampered_derivation_fails_replay() {
        let sys = pipelined(fixtures::EXAMPLE3);
        let RefuteOutcome::Refuted(mut d) = bounded_refute(&sys, 2) else {
            panic!("expected a refutation");
        };
        d.steps[0].fact.as_mut().unwrap().args[1] = nat(0);
        assert!(replay_derivation(&sys, &d).is_err());
    }
}
