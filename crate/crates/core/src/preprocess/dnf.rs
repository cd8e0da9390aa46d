use itertools::Itertools;

use super::nnf::nnf;
use super::report::PassStats;
use crate::ir::{ChcSystem, Clause, Formula, Literal, Signature};

/// Disjunctive normal form as a list of literal conjunctions. `[]` is false,
/// `[[]]` is true.
pub fn dnf(f: &Formula, sig: &Signature) -> Vec<Vec<Literal>> {
    fn go(f: &Formula) -> Vec<Vec<Literal>> {
        match f {
            Formula::True => vec![Vec::new()],
            Formula::False => Vec::new(),
            Formula::Lit(l) => vec![vec![l.clone()]],
            Formula::Or(ps) => ps.iter().flat_map(go).collect(),
            Formula::And(ps) => ps.iter().fold(vec![Vec::new()], |acc, p| {
                acc.iter()
                    .cartesian_product(go(p))
                    .map(|(a, b)| a.iter().cloned().chain(b).collect())
                    .collect()
            }),
            Formula::Not(_) => unreachable!("input is in negation normal form"),
        }
    }
    go(&nnf(f, sig))
}

pub fn conjunction(lits: Vec<Literal>) -> Formula {
    Formula::and(lits.into_iter().map(Formula::Lit).collect())
}

/// Splits every clause whose constraint has `k` disjuncts into `k` clauses
/// with the same atoms and head. Clauses with an unsatisfiable constraint are
/// dropped.
pub fn split_dnf(system: &ChcSystem) -> (ChcSystem, PassStats) {
    let mut stats = PassStats::new("dnf", system.clauses.len());
    let mut clauses = Vec::new();
    for (i, c) in system.clauses.iter().enumerate() {
        let disjuncts = dnf(&c.constraint, &system.signature);
        if disjuncts.is_empty() {
            stats.dropped.push((i, "constraint is false".into()));
            continue;
        }
        if c.constraint.is_conjunctive() {
            clauses.push(c.clone());
            continue;
        }
        for d in disjuncts {
            clauses.push(Clause {
                constraint: conjunction(d),
                ..c.clone()
            });
        }
    }
    stats.output_clauses = clauses.len();
    (ChcSystem::new(system.signature.clone(), clauses), stats)
}
