//! MACE-style model search: flatten every clause, ground it over the fixed
//! domains and hand the result to the SAT solver.

use std::collections::{BTreeSet, HashMap};
use std::time::{Duration, Instant};

use indexmap::IndexMap;
use tracing::debug;

use super::canonical::canonicalize;
use super::finite::{tuples_over, CardinalityVector, FiniteModel, FunctionTable, ModelError, PredicateTable};
use super::sat::{Lit, SolveResult, Solver};
use crate::ir::{ChcSystem, Clause, Head, Signature, Term};

/// Ground clauses are generated eagerly; beyond this many literals the search
/// at this cardinality gives up and reports a timeout.
const MAX_GROUND_LITERALS: usize = 40_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchBudget {
    /// Largest total cardinality the schedule visits.
    pub max_total: usize,
    /// Per `find_model` call.
    pub time_limit: Option<Duration>,
    /// Perturbs the solver's variable order; never changes the verdict.
    pub seed: Option<u64>,
    /// Pins the first nullary constructor of each sort to element 0.
    pub symmetry_breaking: bool,
    /// Requires every element to be the value of some ground constructor
    /// term. Needed for Skolem witnesses to correspond to actual terms; for
    /// purely universal systems the reachable part of any model is itself a
    /// model of smaller or equal size, so this loses nothing.
    pub term_generated: bool,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_total: 8,
            time_limit: None,
            seed: None,
            symmetry_breaking: false,
            term_generated: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FindOutcome {
    Model(FiniteModel),
    /// The search at this cardinality was exhaustive and found nothing.
    NoModelAtThisSize,
    TimedOut,
}

/// Every cardinality vector of total at most `budget.max_total`, by total and
/// then lexicographically in sort declaration order.
pub fn cardinality_schedule(sig: &Signature, budget: &SearchBudget) -> Vec<CardinalityVector> {
    let sorts: Vec<&str> = sig.sorts().collect();
    let k = sorts.len();
    if k == 0 {
        return vec![CardinalityVector::default()];
    }
    fn compositions(total: usize, parts: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 1 {
            prefix.push(total);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in 1..=total - (parts - 1) {
            prefix.push(first);
            compositions(total - first, parts - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    for total in k..=budget.max_total {
        let mut vecs = Vec::new();
        compositions(total, k, &mut Vec::new(), &mut vecs);
        out.extend(vecs.into_iter().map(|sizes| {
            CardinalityVector(sorts.iter().map(|s| s.to_string()).zip(sizes).collect())
        }));
    }
    out
}

struct FunLayout {
    base: usize,
    arg_sizes: Vec<usize>,
    result_size: usize,
}

struct PredLayout {
    base: usize,
    arg_sizes: Vec<usize>,
}

fn row_index(sizes: &[usize], args: impl Iterator<Item = usize>) -> usize {
    sizes.iter().zip(args).fold(0, |acc, (&k, a)| acc * k + a)
}

/// SAT variables: one per function-table cell value, one per predicate bit.
struct Layout {
    funs: IndexMap<String, FunLayout>,
    preds: IndexMap<String, PredLayout>,
    num_vars: usize,
}

impl Layout {
    fn new(sig: &Signature, card: &CardinalityVector) -> Layout {
        let size = |s: &String| card.get(s).unwrap_or(0);
        let mut next = 0;
        let mut funs = IndexMap::new();
        for (name, decl) in sig.functions() {
            let arg_sizes: Vec<usize> = decl.args.iter().map(size).collect();
            let result_size = size(&decl.result);
            let rows: usize = arg_sizes.iter().product();
            funs.insert(
                name.to_string(),
                FunLayout {
                    base: next,
                    arg_sizes,
                    result_size,
                },
            );
            next += rows * result_size;
        }
        let mut preds = IndexMap::new();
        for (name, decl) in sig.predicates() {
            let arg_sizes: Vec<usize> = decl.args.iter().map(size).collect();
            let rows: usize = arg_sizes.iter().product();
            preds.insert(name.to_string(), PredLayout { base: next, arg_sizes });
            next += rows;
        }
        Layout {
            funs,
            preds,
            num_vars: next,
        }
    }

    fn fun_var(&self, f: &str, args: impl Iterator<Item = usize>, value: usize) -> usize {
        let l = &self.funs[f];
        l.base + row_index(&l.arg_sizes, args) * l.result_size + value
    }

    fn pred_var(&self, p: &str, args: impl Iterator<Item = usize>) -> usize {
        let l = &self.preds[p];
        l.base + row_index(&l.arg_sizes, args)
    }
}

/// A clause over slots: each slot is a variable or names the value of one
/// non-variable subterm `f(slots...)`.
struct FlatClause {
    sizes: Vec<usize>,
    defs: Vec<(usize, String, Vec<usize>)>,
    body: Vec<(String, Vec<usize>)>,
    head: Option<(String, Vec<usize>)>,
}

fn flatten(clause: &Clause, sig: &Signature, card: &CardinalityVector) -> FlatClause {
    struct Builder<'a> {
        sig: &'a Signature,
        card: &'a CardinalityVector,
        slots: HashMap<Term, usize>,
        sizes: Vec<usize>,
        defs: Vec<(usize, String, Vec<usize>)>,
    }
    impl Builder<'_> {
        fn slot(&mut self, t: &Term) -> usize {
            if let Some(&i) = self.slots.get(t) {
                return i;
            }
            let sort = t.sort(self.sig).expect("well-sorted term").to_string();
            let args = match t {
                Term::App(_, args) => args.iter().map(|a| self.slot(a)).collect(),
                _ => Vec::new(),
            };
            let i = self.sizes.len();
            self.sizes.push(self.card.get(&sort).unwrap_or(0));
            if let Term::App(f, _) = t {
                self.defs.push((i, f.clone(), args));
            }
            self.slots.insert(t.clone(), i);
            i
        }
    }
    let mut b = Builder {
        sig,
        card,
        slots: HashMap::new(),
        sizes: Vec::new(),
        defs: Vec::new(),
    };
    for v in clause.universal_vars() {
        b.slot(&Term::Var(v));
    }
    let mut atom = |a: &crate::ir::Atom| {
        let slots = a.args.iter().map(|t| b.slot(t)).collect();
        (a.predicate.clone(), slots)
    };
    let body: Vec<_> = clause.body.iter().map(&mut atom).collect();
    let head = match &clause.head {
        Head::False => None,
        Head::Atom(a) => Some(atom(a)),
    };
    FlatClause {
        sizes: b.sizes,
        defs: b.defs,
        body,
        head,
    }
}

enum Grounding {
    Done,
    Unsat,
    OutOfBudget,
}

fn ground(
    flat: &FlatClause,
    layout: &Layout,
    solver: &mut Solver,
    deadline: Option<Instant>,
    literals: &mut usize,
) -> Grounding {
    if flat.sizes.contains(&0) {
        return Grounding::Done;
    }
    let mut a = vec![0usize; flat.sizes.len()];
    let mut lits = Vec::new();
    let mut count = 0u64;
    loop {
        lits.clear();
        for (slot, f, args) in &flat.defs {
            lits.push(Lit::neg(layout.fun_var(f, args.iter().map(|&s| a[s]), a[*slot])));
        }
        for (p, args) in &flat.body {
            lits.push(Lit::neg(layout.pred_var(p, args.iter().map(|&s| a[s]))));
        }
        if let Some((p, args)) = &flat.head {
            lits.push(Lit::pos(layout.pred_var(p, args.iter().map(|&s| a[s]))));
        }
        *literals += lits.len();
        if !solver.add_clause(&lits) {
            return Grounding::Unsat;
        }
        count += 1;
        if count.is_multiple_of(4096) {
            if *literals > MAX_GROUND_LITERALS {
                return Grounding::OutOfBudget;
            }
            if deadline.is_some_and(|d| Instant::now() >= d) {
                return Grounding::OutOfBudget;
            }
        }
        let mut i = a.len();
        loop {
            if i == 0 {
                return Grounding::Done;
            }
            i -= 1;
            a[i] += 1;
            if a[i] < flat.sizes[i] {
                break;
            }
            a[i] = 0;
        }
    }
}

/// Searches for a model of a constraint-free system with exactly the given
/// domain sizes. Returned models are canonically relabelled (see
/// [`canonicalize`]).
pub fn find_model(
    system: &ChcSystem,
    card: &CardinalityVector,
    budget: &SearchBudget,
) -> Result<FindOutcome, ModelError> {
    let deadline = budget.time_limit.map(|d| Instant::now() + d);
    find_model_until(system, card, budget, deadline)
}

/// [`find_model`] with an absolute deadline instead of the budget's limit.
pub fn find_model_until(
    system: &ChcSystem,
    card: &CardinalityVector,
    budget: &SearchBudget,
    deadline: Option<Instant>,
) -> Result<FindOutcome, ModelError> {
    let sig = &system.signature;
    for sort in sig.sorts() {
        if card.get(sort).unwrap_or(0) == 0 {
            return Err(ModelError::MissingSort(sort.to_string()));
        }
    }
    if let Some(i) = system.clauses.iter().position(|c| !c.is_constraint_free()) {
        return Err(ModelError::NotConstraintFree(i));
    }
    let layout = Layout::new(sig, card);
    let mut solver = match budget.seed {
        Some(seed) => Solver::with_seed(seed),
        None => Solver::new(),
    };
    for _ in 0..layout.num_vars {
        solver.new_var();
    }
    let mut ok = true;
    // Each function cell takes exactly one value.
    for l in layout.funs.values() {
        let rows: usize = l.arg_sizes.iter().product();
        for row in 0..rows {
            let cell = |v: usize| l.base + row * l.result_size + v;
            let alo: Vec<Lit> = (0..l.result_size).map(|v| Lit::pos(cell(v))).collect();
            ok &= solver.add_clause(&alo);
            for v in 0..l.result_size {
                for w in v + 1..l.result_size {
                    ok &= solver.add_clause(&[Lit::neg(cell(v)), Lit::neg(cell(w))]);
                }
            }
        }
    }
    if budget.symmetry_breaking {
        for sort in sig.sorts() {
            let first_constant = sig
                .constructors_of(sort)
                .iter()
                .find(|c| sig.constructor(c).is_some_and(|d| d.args.is_empty()));
            if let Some(c) = first_constant {
                ok &= solver.add_clause(&[Lit::pos(layout.fun_var(c, std::iter::empty(), 0))]);
            }
        }
    }
    if budget.term_generated && ok {
        ok = add_reachability(sig, card, &layout, &mut solver);
    }
    let mut literals = 0usize;
    let flats: Vec<FlatClause> = system
        .clauses
        .iter()
        .map(|c| flatten(c, sig, card))
        .collect();
    for flat in &flats {
        if !ok {
            break;
        }
        match ground(flat, &layout, &mut solver, deadline, &mut literals) {
            Grounding::Done => {}
            Grounding::Unsat => ok = false,
            Grounding::OutOfBudget => return Ok(FindOutcome::TimedOut),
        }
    }
    debug!(
        %card,
        vars = solver.num_vars(),
        clauses = solver.num_clauses(),
        literals,
        "grounded"
    );
    if !ok {
        return Ok(FindOutcome::NoModelAtThisSize);
    }
    let result = solver.solve(deadline);
    debug!(%card, ?result, conflicts = solver.conflicts, decisions = solver.decisions, "solved");
    match result {
        SolveResult::Unsat => Ok(FindOutcome::NoModelAtThisSize),
        SolveResult::Unknown => Ok(FindOutcome::TimedOut),
        SolveResult::Sat => {
            let mut model = extract(sig, card, &layout, &solver);
            least_predicates(&flats, &mut model);
            Ok(FindOutcome::Model(canonicalize(&model, sig)))
        }
    }
}

/// Requires every element of every sort to be reached by a constructor term.
/// `reach[k][s][e]` says element `e` of sort `s` is the value of a term of
/// height at most `k`; heights up to the total cardinality suffice because
/// each level either reaches a new element or changes nothing.
fn add_reachability(
    sig: &Signature,
    card: &CardinalityVector,
    layout: &Layout,
    solver: &mut Solver,
) -> bool {
    let levels = card.total();
    let sorts: Vec<&str> = sig.sorts().collect();
    let mut reach: Vec<IndexMap<&str, Vec<usize>>> = Vec::new();
    let mut ok = true;
    for k in 0..levels {
        let mut level = IndexMap::new();
        for &s in &sorts {
            let vars: Vec<usize> = (0..card.get(s).unwrap_or(0)).map(|_| solver.new_var()).collect();
            level.insert(s, vars);
        }
        for &s in &sorts {
            for (e, &r) in level[s].iter().enumerate() {
                let mut support = vec![Lit::neg(r)];
                if k > 0 {
                    support.push(Lit::pos(reach[k - 1][s][e]));
                }
                for c in sig.constructors_of(s) {
                    let decl = sig.constructor(c).expect("constructor");
                    if k == 0 && !decl.args.is_empty() {
                        continue;
                    }
                    let sizes: Vec<usize> = decl.args.iter().map(|a| card.get(a).unwrap_or(0)).collect();
                    for row in tuples_over(&sizes) {
                        let via = solver.new_var();
                        support.push(Lit::pos(via));
                        let cell = layout.fun_var(c, row.iter().copied(), e);
                        ok &= solver.add_clause(&[Lit::neg(via), Lit::pos(cell)]);
                        for (arg_sort, &v) in decl.args.iter().zip(&row) {
                            let below = reach[k - 1][arg_sort.as_str()][v];
                            ok &= solver.add_clause(&[Lit::neg(via), Lit::pos(below)]);
                        }
                    }
                }
                ok &= solver.add_clause(&support);
            }
        }
        reach.push(level);
    }
    if let Some(top) = reach.last() {
        for vars in top.values() {
            for &r in vars {
                ok &= solver.add_clause(&[Lit::pos(r)]);
            }
        }
    }
    ok
}

/// Replaces every predicate table by the least interpretation over the
/// model's own function tables. The solver's tables are a fixed point of the
/// definite clauses, so the least one is contained in them and query clauses
/// stay satisfied.
fn least_predicates(flats: &[FlatClause], model: &mut FiniteModel) {
    for table in model.predicates.values_mut() {
        table.tuples.clear();
    }
    loop {
        let mut changed = false;
        for flat in flats {
            let Some((head, head_args)) = &flat.head else {
                continue;
            };
            let var_slots: Vec<usize> = (0..flat.sizes.len())
                .filter(|i| !flat.defs.iter().any(|d| d.0 == *i))
                .collect();
            let var_sizes: Vec<usize> = var_slots.iter().map(|&i| flat.sizes[i]).collect();
            let mut a = vec![0usize; flat.sizes.len()];
            for values in tuples_over(&var_sizes) {
                for (&slot, v) in var_slots.iter().zip(values) {
                    a[slot] = v;
                }
                for (slot, f, args) in &flat.defs {
                    let args: Vec<usize> = args.iter().map(|&s| a[s]).collect();
                    a[*slot] = model.apply(f, &args).expect("total table");
                }
                let fires = flat.body.iter().all(|(p, args)| {
                    let args: Vec<usize> = args.iter().map(|&s| a[s]).collect();
                    model.holds(p, &args)
                });
                if fires {
                    let tuple = head_args.iter().map(|&s| a[s]).collect();
                    changed |= model.predicates[head.as_str()].tuples.insert(tuple);
                }
            }
        }
        if !changed {
            break;
        }
    }
}

fn extract(sig: &Signature, card: &CardinalityVector, layout: &Layout, solver: &Solver) -> FiniteModel {
    let mut model = FiniteModel {
        domains: sig
            .sorts()
            .map(|s| (s.to_string(), card.get(s).unwrap_or(0)))
            .collect(),
        ..FiniteModel::default()
    };
    for (name, decl) in sig.functions() {
        let l = &layout.funs[name];
        let rows: usize = l.arg_sizes.iter().product();
        let values = (0..rows)
            .map(|row| {
                (0..l.result_size)
                    .find(|&v| solver.value(l.base + row * l.result_size + v))
                    .expect("exactly one value per cell")
            })
            .collect();
        model.functions.insert(
            name.to_string(),
            FunctionTable {
                args: decl.args.clone(),
                result: decl.result.clone(),
                values,
            },
        );
    }
    for (name, decl) in sig.predicates() {
        let l = &layout.preds[name];
        let tuples: BTreeSet<Vec<usize>> = tuples_over(&l.arg_sizes)
            .into_iter()
            .enumerate()
            .filter(|(i, _)| solver.value(l.base + i))
            .map(|(_, t)| t)
            .collect();
        model.predicates.insert(
            name.to_string(),
            PredicateTable {
                args: decl.args.clone(),
                tuples,
            },
        );
    }
    model
}
