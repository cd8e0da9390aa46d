use indexmap::IndexMap;

use super::report::{PassStats, PreprocessError};
use crate::ir::{
    Atom, ChcSystem, Clause, Formula, Head, Literal, PredicateOrigin, Signature, Term, Var,
};

/// Sorts whose disequality depends on disequality of `roots`, including the
/// roots: the closure under constructor argument sorts, in signature order.
pub fn diseq_sorts(sig: &Signature, roots: &[String]) -> Vec<String> {
    let mut reach: Vec<String> = roots.to_vec();
    let mut i = 0;
    while i < reach.len() {
        let sort = reach[i].clone();
        for c in sig.constructors_of(&sort) {
            for a in &sig.constructor(c).unwrap().args {
                if !reach.contains(a) {
                    reach.push(a.clone());
                }
            }
        }
        i += 1;
    }
    sig.sorts()
        .filter(|s| reach.iter().any(|r| r == s))
        .map(str::to_string)
        .collect()
}

fn ctor_vars(sig: &Signature, ctor: &str, prefix: &str) -> Vec<Term> {
    sig.constructor(ctor)
        .unwrap()
        .args
        .iter()
        .enumerate()
        .map(|(i, s)| Term::var(format!("{prefix}{}", i + 1), s.clone()))
        .collect()
}

fn clause_over(terms: &[&Term], body: Vec<Atom>, head: Atom) -> Clause {
    let mut vars: Vec<Var> = Vec::new();
    for t in terms {
        t.collect_vars(&mut vars);
    }
    Clause::new(vars, Formula::True, body, Head::Atom(head)).with_origin("diseq rule")
}

/// Registers `diseq_<sort>` predicates for the closure of `roots` and returns
/// the predicate name per sort together with the defining rules:
///
/// * `true -> diseq_s(c(x..), d(y..))` for distinct constructors `c`, `d`;
/// * `diseq_t(xi, yi) -> diseq_s(c(x1..xn), c(y1..yn))` for every argument
///   position `i` of sort `t`. The other positions are independent variables,
///   so terms differing in several positions are still related.
pub fn add_diseq_rules(
    sig: &mut Signature,
    roots: &[String],
) -> Result<(IndexMap<String, String>, Vec<Clause>), PreprocessError> {
    let sorts = diseq_sorts(sig, roots);
    let mut names = IndexMap::new();
    for s in &sorts {
        let name = sig.fresh_name(&format!("diseq_{s}"));
        sig.add_predicate(
            &name,
            vec![s.clone(), s.clone()],
            PredicateOrigin::Diseq { sort: s.clone() },
        )?;
        names.insert(s.clone(), name);
    }
    let mut rules = Vec::new();
    for s in &sorts {
        let ctors = sig.constructors_of(s).to_vec();
        for c in &ctors {
            for d in ctors.iter().filter(|d| *d != c) {
                let l = Term::App(c.clone(), ctor_vars(sig, c, "x"));
                let r = Term::App(d.clone(), ctor_vars(sig, d, "y"));
                let head = Atom::new(names[s].clone(), vec![l.clone(), r.clone()]);
                rules.push(clause_over(&[&l, &r], vec![], head));
            }
        }
        for c in &ctors {
            let xs = ctor_vars(sig, c, "x");
            let ys = ctor_vars(sig, c, "y");
            let arg_sorts = sig.constructor(c).unwrap().args.clone();
            for (i, arg_sort) in arg_sorts.iter().enumerate() {
                let l = Term::App(c.clone(), xs.clone());
                let r = Term::App(c.clone(), ys.clone());
                let premise = Atom::new(names[arg_sort].clone(), vec![xs[i].clone(), ys[i].clone()]);
                let head = Atom::new(names[s].clone(), vec![l.clone(), r.clone()]);
                rules.push(clause_over(&[&l, &r], vec![premise], head));
            }
        }
    }
    Ok((names, rules))
}

/// A system holding only the generated disequality rules for `roots`.
pub fn diseq_rule_system(
    sig: &Signature,
    roots: &[String],
) -> Result<(ChcSystem, IndexMap<String, String>), PreprocessError> {
    let mut sig = sig.clone();
    let (names, rules) = add_diseq_rules(&mut sig, roots)?;
    Ok((ChcSystem::new(sig, rules), names))
}

/// Replaces every disequality `t != u` of sort `s` by the atom
/// `diseq_s(t, u)` and appends the rules defining `diseq_s`.
pub fn encode_disequalities(
    system: &ChcSystem,
) -> Result<(ChcSystem, PassStats), PreprocessError> {
    let mut stats = PassStats::new("disequalities", system.clauses.len());
    let sig = &system.signature;
    let mut roots: Vec<String> = Vec::new();
    for (i, c) in system.clauses.iter().enumerate() {
        for l in c.constraint.literals() {
            if let Literal::Diseq(a, b) = l {
                let skolem = |t: &Term| t.mentions_function(&|f| sig.is_skolem(f));
                if skolem(a) || skolem(b) {
                    return Err(PreprocessError::SkolemDisequality {
                        clause: i,
                        literal: l.to_string(),
                    });
                }
                let sort = a.sort(sig).unwrap_or_default().to_string();
                if !roots.contains(&sort) {
                    roots.push(sort);
                }
            }
        }
    }
    if roots.is_empty() {
        stats.output_clauses = system.clauses.len();
        return Ok((system.clone(), stats));
    }
    let mut out_sig = sig.clone();
    let (names, rules) = add_diseq_rules(&mut out_sig, &roots)?;
    stats.generated = names.values().cloned().collect();
    let mut clauses = Vec::new();
    for c in &system.clauses {
        let mut atoms = Vec::new();
        let mut rest = Vec::new();
        for l in c.constraint.literals() {
            match l {
                Literal::Diseq(a, b) => {
                    let sort = a.sort(sig).unwrap_or_default();
                    atoms.push(Atom::new(names[sort].clone(), vec![a.clone(), b.clone()]));
                }
                other => rest.push(Formula::Lit(other.clone())),
            }
        }
        if atoms.is_empty() {
            clauses.push(c.clone());
            continue;
        }
        if c.is_query() {
            let reflexive = atoms.iter().any(|a| a.args[0] == a.args[1]);
            let open = atoms
                .iter()
                .any(|a| !a.args[0].is_ground() && !a.args[1].is_ground());
            if !reflexive && open {
                stats.notes.push(format!(
                    "query `{c}` forbids disequal pairs that other atoms may relate; \
                     if it forces {} to be irreflexive everywhere, no finite model exists",
                    atoms[0].predicate
                ));
            }
        }
        atoms.extend(c.body.iter().cloned());
        clauses.push(Clause {
            constraint: Formula::and(rest),
            body: atoms,
            ..c.clone()
        });
    }
    clauses.extend(rules);
    stats.output_clauses = clauses.len();
    Ok((ChcSystem::new(out_sig, clauses), stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{list_signature, nat_signature};

    fn rules_of(sys: &ChcSystem) -> Vec<String> {
        sys.clauses.iter().map(|c| c.to_string()).collect()
    }

    #[test]
    fn example3_becomes_four_clauses() {
        let sig = nat_signature();
        let q = Clause::new(
            [],
            Formula::Lit(Literal::Diseq(
                Term::constant("Z"),
                Term::app("S", vec![Term::constant("Z")]),
            )),
            vec![],
            Head::False,
        );
        let (out, stats) = encode_disequalities(&ChcSystem::new(sig, vec![q])).unwrap();
        assert_eq!(
            rules_of(&out),
            [
                "diseq_Nat(Z,S(Z)) -> false",
                "true -> diseq_Nat(Z,S(y1))",
                "true -> diseq_Nat(S(x1),Z)",
                "diseq_Nat(x1,y1) -> diseq_Nat(S(x1),S(y1))",
            ]
        );
        assert_eq!(stats.generated, ["diseq_Nat"]);
        assert!(out.signature.predicate("diseq_Nat").unwrap().origin.is_generated());
    }

    #[test]
    fn list_rules_cover_nat() {
        let sig = list_signature();
        let (sys, names) = diseq_rule_system(&sig, &["List".to_string()]).unwrap();
        assert_eq!(names.keys().collect::<Vec<_>>(), ["Nat", "List"]);
        let got = rules_of(&sys);
        for expected in [
            "true -> diseq_List(nil,cons(y1,y2))",
            "true -> diseq_List(cons(x1,x2),nil)",
            "diseq_Nat(x1,y1) -> diseq_List(cons(x1,x2),cons(y1,y2))",
            "diseq_List(x2,y2) -> diseq_List(cons(x1,x2),cons(y1,y2))",
            "true -> diseq_Nat(Z,S(y1))",
            "diseq_Nat(x1,y1) -> diseq_Nat(S(x1),S(y1))",
        ] {
            assert!(got.iter().any(|g| g == expected), "missing {expected}");
        }
        assert_eq!(got.len(), 7);
    }

    #[test]
    fn no_disequalities_no_rules() {
        let sys = ChcSystem::new(nat_signature(), vec![]);
        let (out, stats) = encode_disequalities(&sys).unwrap();
        assert_eq!(out, sys);
        assert!(stats.generated.is_empty());
    }
}
