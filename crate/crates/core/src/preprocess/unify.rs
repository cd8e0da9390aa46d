use super::report::{PassStats, PreprocessError};
use crate::ir::{ChcSystem, Clause, Formula, Literal, Signature, Substitution, Term};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UnifyFailure {
    /// Different constructors at the same position.
    Clash(Term, Term),
    /// `x = t` with `x` occurring strictly inside `t`.
    Occurs(String, Term),
    /// A Skolem application against a different non-variable term; the
    /// Herbrand value of a Skolem term is unknown, so this is not decidable
    /// syntactically.
    Skolem(Term, Term),
}

/// Most general unifier of a set of equations, in solved (idempotent) form.
/// `rank` orders variables: of two variables, the higher-ranked one is bound
/// to the lower-ranked one.
pub fn unify(
    equations: &[(Term, Term)],
    sig: &Signature,
    rank: &dyn Fn(&str) -> usize,
) -> Result<Substitution, UnifyFailure> {
    let mut sub = Substitution::new();
    let mut work: Vec<(Term, Term)> = equations.iter().rev().cloned().collect();
    while let Some((s, t)) = work.pop() {
        let (s, t) = (s.substitute(&sub), t.substitute(&sub));
        if s == t {
            continue;
        }
        let (var, term) = match (&s, &t) {
            (Term::Var(a), Term::Var(b)) => {
                if rank(&a.name) >= rank(&b.name) {
                    (a.name.clone(), t.clone())
                } else {
                    (b.name.clone(), s.clone())
                }
            }
            (Term::Var(a), _) => (a.name.clone(), t.clone()),
            (_, Term::Var(b)) => (b.name.clone(), s.clone()),
            (Term::App(f, fa), Term::App(g, ga)) => {
                if sig.is_skolem(f) || sig.is_skolem(g) {
                    return Err(UnifyFailure::Skolem(s.clone(), t.clone()));
                }
                if f != g || fa.len() != ga.len() {
                    return Err(UnifyFailure::Clash(s.clone(), t.clone()));
                }
                for pair in fa.iter().cloned().zip(ga.iter().cloned()).rev() {
                    work.push(pair);
                }
                continue;
            }
            _ => return Err(UnifyFailure::Clash(s.clone(), t.clone())),
        };
        if term.occurs(&var) {
            return Err(UnifyFailure::Occurs(var, term));
        }
        let single = Substitution::from([(var.clone(), term.clone())]);
        for v in sub.values_mut() {
            *v = v.substitute(&single);
        }
        sub.insert(var, term);
    }
    Ok(sub)
}

/// Removes equality literals from conjunctive constraints by applying their
/// most general unifier to the whole clause. Clauses whose equalities have no
/// Herbrand solution are dropped.
pub fn eliminate_equalities(system: &ChcSystem) -> Result<(ChcSystem, PassStats), PreprocessError> {
    let mut stats = PassStats::new("equalities", system.clauses.len());
    let mut clauses = Vec::new();
    for (i, c) in system.clauses.iter().enumerate() {
        let mut equations = Vec::new();
        let mut rest = Vec::new();
        for l in c.constraint.literals() {
            match l {
                Literal::Eq(a, b) => equations.push((a.clone(), b.clone())),
                other => rest.push(Formula::Lit(other.clone())),
            }
        }
        if equations.is_empty() {
            clauses.push(c.clone());
            continue;
        }
        let rank = |v: &str| c.universals.get_index_of(v).unwrap_or(usize::MAX);
        match unify(&equations, &system.signature, &rank) {
            Ok(sub) => {
                let mut out = Clause {
                    constraint: Formula::and(rest),
                    ..c.clone()
                }
                .substitute(&sub);
                for v in sub.keys() {
                    out.universals.shift_remove(v);
                }
                out.prune_variables();
                stats.substitutions.push((i, sub));
                clauses.push(out);
            }
            Err(UnifyFailure::Clash(a, b)) => {
                stats.dropped.push((i, format!("constructor clash {a} = {b}")));
            }
            Err(UnifyFailure::Occurs(v, t)) => {
                stats.dropped.push((i, format!("occurs check {v} = {t}")));
            }
            Err(UnifyFailure::Skolem(a, b)) => {
                return Err(PreprocessError::SkolemEquality {
                    clause: i,
                    literal: format!("{a} = {b}"),
                })
            }
        }
    }
    stats.output_clauses = clauses.len();
    Ok((ChcSystem::new(system.signature.clone(), clauses), stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::nat_signature;
    use crate::ir::{Atom, Head, PredicateOrigin, Var};

    fn z() -> Term {
        Term::constant("Z")
    }
    fn s(t: Term) -> Term {
        Term::app("S", vec![t])
    }
    fn x() -> Term {
        Term::var("x", "Nat")
    }
    fn y() -> Term {
        Term::var("y", "Nat")
    }

    fn system(eqs: Vec<(Term, Term)>) -> ChcSystem {
        let mut sig = nat_signature();
        sig.add_predicate("inc", vec!["Nat".into(), "Nat".into()], PredicateOrigin::User)
            .unwrap();
        let constraint = Formula::and(
            eqs.into_iter()
                .map(|(a, b)| Formula::Lit(Literal::Eq(a, b)))
                .collect(),
        );
        let clause = Clause::new(
            [Var::new("x", "Nat"), Var::new("y", "Nat")],
            constraint,
            vec![],
            Head::Atom(Atom::new("inc", vec![x(), y()])),
        );
        ChcSystem::new(sig, vec![clause])
    }

    #[test]
    fn solves_ground_bindings() {
        let (out, stats) =
            eliminate_equalities(&system(vec![(x(), z()), (y(), s(z()))])).unwrap();
        assert_eq!(out.clauses[0].to_string(), "true -> inc(Z,S(Z))");
        assert!(out.clauses[0].universals.is_empty());
        assert_eq!(stats.substitutions.len(), 1);
    }

    #[test]
    fn occurs_check_drops_clause() {
        let (out, stats) = eliminate_equalities(&system(vec![(x(), s(x()))])).unwrap();
        assert!(out.clauses.is_empty());
        assert!(stats.dropped[0].1.starts_with("occurs"));
    }

    #[test]
    fn clash_drops_clause() {
        let (out, stats) = eliminate_equalities(&system(vec![(z(), s(y()))])).unwrap();
        assert!(out.clauses.is_empty());
        assert!(stats.dropped[0].1.starts_with("constructor clash"));
    }

    #[test]
    fn unifier_is_idempotent_and_solves_all_equations() {
        let sig = nat_signature();
        let eqs = vec![(x(), s(y())), (y(), s(z()))];
        let rank = |v: &str| if v == "x" { 0 } else { 1 };
        let sub = unify(&eqs, &sig, &rank).unwrap();
        for (a, b) in &eqs {
            assert_eq!(a.substitute(&sub), b.substitute(&sub));
        }
        for t in sub.values() {
            assert_eq!(t.substitute(&sub), *t);
        }
    }

    #[test]
    fn later_variable_is_bound_to_earlier() {
        let sig = nat_signature();
        let rank = |v: &str| if v == "x" { 0 } else { 1 };
        let sub = unify(&[(x(), y())], &sig, &rank).unwrap();
        assert_eq!(sub.get("y"), Some(&x()));
    }
}
