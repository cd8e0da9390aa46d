use super::report::PassStats;
use crate::ir::{ChcSystem, Formula, Literal, Signature};

fn negate(f: &Formula, sig: &Signature) -> Formula {
    match f {
        Formula::True => Formula::False,
        Formula::False => Formula::True,
        Formula::Lit(Literal::Eq(a, b)) => Formula::Lit(Literal::Diseq(a.clone(), b.clone())),
        Formula::Lit(Literal::Diseq(a, b)) => Formula::Lit(Literal::Eq(a.clone(), b.clone())),
        Formula::Lit(Literal::Tester { constructor, term }) => {
            let sort = sig
                .constructor(constructor)
                .map(|d| d.result.as_str())
                .unwrap_or_default();
            let others: Vec<Formula> = sig
                .constructors_of(sort)
                .iter()
                .filter(|c| *c != constructor)
                .map(|c| {
                    Formula::Lit(Literal::Tester {
                        constructor: c.clone(),
                        term: term.clone(),
                    })
                })
                .collect();
            match others.len() {
                0 => Formula::False,
                1 => others.into_iter().next().unwrap(),
                _ => Formula::Or(others),
            }
        }
        Formula::Not(inner) => nnf(inner, sig),
        Formula::And(ps) => Formula::Or(ps.iter().map(|p| negate(p, sig)).collect()),
        Formula::Or(ps) => Formula::and(ps.iter().map(|p| negate(p, sig)).collect()),
    }
}

/// Pushes negation down to literals. The result contains no `Not`.
pub fn nnf(f: &Formula, sig: &Signature) -> Formula {
    match f {
        Formula::Not(inner) => negate(inner, sig),
        Formula::And(ps) => Formula::and(ps.iter().map(|p| nnf(p, sig)).collect()),
        Formula::Or(ps) => Formula::Or(ps.iter().map(|p| nnf(p, sig)).collect()),
        other => other.clone(),
    }
}

pub fn to_nnf(system: &ChcSystem) -> (ChcSystem, PassStats) {
    let mut out = system.clone();
    for c in &mut out.clauses {
        c.constraint = nnf(&c.constraint, &system.signature);
    }
    let mut stats = PassStats::new("nnf", system.clauses.len());
    stats.output_clauses = out.clauses.len();
    (out, stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::list_signature;
    use crate::ir::Term;

    fn lit(l: Literal) -> Formula {
        Formula::Lit(l)
    }

    #[test]
    fn negated_equality_is_disequality() {
        let sig = list_signature();
        let x = Term::var("x", "Nat");
        let sy = Term::app("S", vec![Term::var("y", "Nat")]);
        let f = Formula::Not(Box::new(lit(Literal::Eq(x.clone(), sy.clone()))));
        assert_eq!(nnf(&f, &sig), lit(Literal::Diseq(x, sy)));
    }

    #[test]
    fn de_morgan_and_double_negation() {
        let sig = list_signature();
        let a = lit(Literal::Eq(Term::var("x", "Nat"), Term::constant("Z")));
        let b = lit(Literal::Diseq(Term::var("y", "Nat"), Term::constant("Z")));
        let f = Formula::Not(Box::new(Formula::And(vec![a.clone(), b.clone()])));
        assert_eq!(
            nnf(&f, &sig),
            Formula::Or(vec![
                lit(Literal::Diseq(Term::var("x", "Nat"), Term::constant("Z"))),
                lit(Literal::Eq(Term::var("y", "Nat"), Term::constant("Z"))),
            ])
        );
        let g = Formula::Not(Box::new(Formula::Not(Box::new(a.clone()))));
        assert_eq!(nnf(&g, &sig), a);
    }

    #[test]
    fn negated_tester_is_other_testers() {
        let sig = list_signature();
        let x = Term::var("x", "List");
        let f = Formula::Not(Box::new(lit(Literal::Tester {
            constructor: "nil".into(),
            term: x.clone(),
        })));
        assert_eq!(
            nnf(&f, &sig),
            lit(Literal::Tester {
                constructor: "cons".into(),
                term: x
            })
        );
    }
}
