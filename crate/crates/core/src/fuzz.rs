//! Seeded generator of small random constraint-free clause systems, used to
//! cross-check the model finder against the refuter.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ir::{Atom, ChcSystem, Clause, Formula, Head, PredicateOrigin, Signature, Term, Var};

/// Size limits for [`random_system`].
#[derive(Debug, Clone, Copy)]
pub struct FuzzLimits {
    pub max_sorts: usize,
    pub max_predicates: usize,
    pub max_clauses: usize,
    pub max_term_depth: usize,
}

impl Default for FuzzLimits {
    fn default() -> Self {
        FuzzLimits {
            max_sorts: 2,
            max_predicates: 3,
            max_clauses: 6,
            max_term_depth: 2,
        }
    }
}

struct Gen<'a> {
    rng: ChaCha8Rng,
    sig: &'a Signature,
    max_depth: usize,
}

impl Gen<'_> {
    fn term(&mut self, sort: &str, depth: usize, vars: &[Var]) -> Term {
        let candidates: Vec<&Var> = vars.iter().filter(|v| v.sort == sort).collect();
        if !candidates.is_empty() && (depth == 0 || self.rng.gen_bool(0.5)) {
            return Term::Var((*candidates.choose(&mut self.rng).unwrap()).clone());
        }
        let ctors = self.sig.constructors_of(sort).to_vec();
        let usable: Vec<&String> = if depth == 0 {
            ctors
                .iter()
                .filter(|c| self.sig.constructor(c).unwrap().args.is_empty())
                .collect()
        } else {
            ctors.iter().collect()
        };
        let c = (*usable.choose(&mut self.rng).unwrap()).clone();
        let args = self.sig.constructor(&c).unwrap().args.clone();
        let sub = args
            .iter()
            .map(|s| self.term(s, depth.saturating_sub(1), vars))
            .collect();
        Term::App(c, sub)
    }

    fn atom(&mut self, pred: &str, vars: &[Var]) -> Atom {
        let sorts = self.sig.predicate(pred).unwrap().args.clone();
        let depth = self.max_depth;
        let args = sorts
            .iter()
            .map(|s| {
                let d = self.rng.gen_range(0..=depth);
                self.term(s, d, vars)
            })
            .collect();
        Atom::new(pred, args)
    }
}

/// A random system over at most `limits.max_sorts` sorts, each with a
/// nullary constructor, plus up to two more constructors of arity at most 2.
/// Clauses have up to two body atoms; roughly a third of them are queries.
pub fn random_system(seed: u64, limits: FuzzLimits) -> ChcSystem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sig = Signature::new();
    let n_sorts = rng.gen_range(1..=limits.max_sorts.max(1));
    let sorts: Vec<String> = (0..n_sorts).map(|i| format!("S{i}")).collect();
    for s in &sorts {
        sig.add_sort(s).expect("fresh sort");
    }
    for (i, s) in sorts.iter().enumerate() {
        sig.add_constructor(&format!("c{i}"), Vec::new(), s)
            .expect("fresh constructor");
        for k in 0..rng.gen_range(0..=2) {
            let arity = rng.gen_range(1..=2);
            let args = (0..arity)
                .map(|_| sorts.choose(&mut rng).unwrap().clone())
                .collect();
            sig.add_constructor(&format!("f{i}_{k}"), args, s)
                .expect("fresh constructor");
        }
    }
    let n_preds = rng.gen_range(1..=limits.max_predicates.max(1));
    let preds: Vec<String> = (0..n_preds).map(|i| format!("p{i}")).collect();
    for p in &preds {
        let arity = rng.gen_range(1..=2);
        let args = (0..arity)
            .map(|_| sorts.choose(&mut rng).unwrap().clone())
            .collect();
        sig.add_predicate(p, args, PredicateOrigin::User)
            .expect("fresh predicate");
    }

    let n_clauses = rng.gen_range(1..=limits.max_clauses.max(1));
    let mut gen = Gen {
        rng,
        sig: &sig,
        max_depth: limits.max_term_depth,
    };
    let mut clauses = Vec::new();
    for _ in 0..n_clauses {
        let pool: Vec<Var> = (0..gen.rng.gen_range(1..=3))
            .map(|i| Var::new(format!("x{i}"), sorts.choose(&mut gen.rng).unwrap().clone()))
            .collect();
        let n_body = gen.rng.gen_range(0..=2);
        let body: Vec<Atom> = (0..n_body)
            .map(|_| {
                let p = preds.choose(&mut gen.rng).unwrap().clone();
                gen.atom(&p, &pool)
            })
            .collect();
        let head = if gen.rng.gen_bool(1.0 / 3.0) {
            Head::False
        } else {
            let p = preds.choose(&mut gen.rng).unwrap().clone();
            Head::Atom(gen.atom(&p, &pool))
        };
        let mut clause = Clause::new(pool, Formula::True, body, head)
            .with_origin("random");
        clause.prune_variables();
        clauses.push(clause);
    }
    ChcSystem::new(sig, clauses)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::check_well_sorted;

    #[test]
    fn generated_systems_are_well_sorted_and_within_limits() {
        let limits = FuzzLimits::default();
        for seed in 0..100 {
            let sys = random_system(seed, limits);
            assert!(check_well_sorted(&sys).is_empty(), "seed {seed}");
            assert!(sys.is_constraint_free());
            assert!(sys.signature.sort_count() <= 2);
            assert!(sys.signature.predicates().count() <= 3);
            assert!(sys.clauses.len() <= 6);
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let a = random_system(7, FuzzLimits::default());
        let b = random_system(7, FuzzLimits::default());
        assert_eq!(a, b);
    }
}
