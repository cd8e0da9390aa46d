use indexmap::IndexMap;

use super::dnf::{conjunction, dnf};
use super::report::{PassStats, PreprocessError};
use crate::ir::{
    Atom, ChcSystem, Clause, Formula, Head, Literal, PredicateOrigin, Signature, Term,
};

fn mentions_selector_or_tester(c: &Clause) -> bool {
    c.terms().iter().any(|t| t.has_selector())
        || c
            .constraint
            .literals()
            .iter()
            .any(|l| matches!(l, Literal::Tester { .. }))
}

struct Relations {
    /// Generated predicate per selector or tester name (`car`, `cons?`).
    names: IndexMap<String, String>,
    rules: Vec<Clause>,
}

impl Relations {
    fn selector(&mut self, sig: &mut Signature, sel: &str) -> Result<String, PreprocessError> {
        if let Some(n) = self.names.get(sel) {
            return Ok(n.clone());
        }
        let decl = sig.selector(sel).expect("declared selector").clone();
        let name = sig.fresh_name(&format!("{sel}_rel"));
        sig.add_predicate(
            &name,
            vec![decl.sort.clone(), decl.result.clone()],
            PredicateOrigin::Selector {
                selector: sel.to_string(),
            },
        )?;
        let (x, fields) = definition_vars(sig, &decl.constructor);
        let head = Atom::new(name.clone(), vec![x.clone(), fields[decl.index].clone()]);
        self.rules
            .push(definition(&decl.constructor, x, fields, head).with_origin("selector rule"));
        self.names.insert(sel.to_string(), name.clone());
        Ok(name)
    }

    fn tester(&mut self, sig: &mut Signature, ctor: &str) -> Result<String, PreprocessError> {
        let key = format!("{ctor}?");
        if let Some(n) = self.names.get(&key) {
            return Ok(n.clone());
        }
        let sort = sig.constructor(ctor).expect("constructor").result.clone();
        let name = sig.fresh_name(&format!("{ctor}?_rel"));
        sig.add_predicate(
            &name,
            vec![sort],
            PredicateOrigin::Tester {
                constructor: ctor.to_string(),
            },
        )?;
        let (x, fields) = definition_vars(sig, ctor);
        let head = Atom::new(name.clone(), vec![x.clone()]);
        self.rules
            .push(definition(ctor, x, fields, head).with_origin("tester rule"));
        self.names.insert(key, name.clone());
        Ok(name)
    }
}

fn definition_vars(sig: &Signature, ctor: &str) -> (Term, Vec<Term>) {
    let decl = sig.constructor(ctor).unwrap();
    let x = Term::var("x", decl.result.clone());
    let fields = decl
        .args
        .iter()
        .enumerate()
        .map(|(i, s)| Term::var(format!("y{}", i + 1), s.clone()))
        .collect();
    (x, fields)
}

/// `x = c(y1..yn) -> head`
fn definition(ctor: &str, x: Term, fields: Vec<Term>, head: Atom) -> Clause {
    let mut vars = Vec::new();
    x.collect_vars(&mut vars);
    for f in &fields {
        f.collect_vars(&mut vars);
    }
    Clause::new(
        vars,
        Formula::Lit(Literal::Eq(x, Term::App(ctor.to_string(), fields))),
        vec![],
        Head::Atom(head),
    )
}

struct Flattener<'a> {
    sig: &'a mut Signature,
    rels: &'a mut Relations,
    clause_vars: IndexMap<String, String>,
    atoms: Vec<Atom>,
}

impl Flattener<'_> {
    fn fresh_var(&mut self, sort: &str) -> Term {
        let name = (1..)
            .map(|i| format!("a{i}"))
            .find(|n| !self.clause_vars.contains_key(n))
            .unwrap();
        self.clause_vars.insert(name.clone(), sort.to_string());
        Term::var(name, sort)
    }

    fn term(&mut self, t: &Term) -> Result<Term, PreprocessError> {
        Ok(match t {
            Term::Var(_) => t.clone(),
            Term::App(f, args) => Term::App(
                f.clone(),
                args.iter().map(|a| self.term(a)).collect::<Result<_, _>>()?,
            ),
            Term::Select(s, inner) => {
                let inner = self.term(inner)?;
                let rel = self.rels.selector(self.sig, s)?;
                let result = self.sig.selector(s).unwrap().result.clone();
                let a = self.fresh_var(&result);
                self.atoms.push(Atom::new(rel, vec![inner, a.clone()]));
                a
            }
        })
    }

    fn atom(&mut self, a: &Atom) -> Result<Atom, PreprocessError> {
        Ok(Atom::new(
            a.predicate.clone(),
            a.args.iter().map(|t| self.term(t)).collect::<Result<_, _>>()?,
        ))
    }
}

/// Replaces selector applications `s(t)` by a fresh variable `a` plus the
/// body atom `s_rel(t, a)`, and testers `c?(t)` by the body atom
/// `c?_rel(t)`, adding the defining clauses `x = c(y..) -> s_rel(x, yi)` and
/// `x = c(y..) -> c?_rel(x)`. Clauses with testers or selectors are split
/// into DNF first so every tester lands in a conjunctive body.
///
/// A selector applied to a term built with another constructor has no
/// `s_rel` fact, so clauses depending on it never fire.
pub fn eliminate_testers_selectors(
    system: &ChcSystem,
) -> Result<(ChcSystem, PassStats), PreprocessError> {
    let mut stats = PassStats::new("testers-selectors", system.clauses.len());
    let mut sig = system.signature.clone();
    let mut rels = Relations {
        names: IndexMap::new(),
        rules: Vec::new(),
    };
    let mut clauses = Vec::new();
    for c in &system.clauses {
        if !mentions_selector_or_tester(c) {
            clauses.push(c.clone());
            continue;
        }
        for disjunct in dnf(&c.constraint, &sig) {
            let mut fl = Flattener {
                sig: &mut sig,
                rels: &mut rels,
                clause_vars: c.universals.clone(),
                atoms: Vec::new(),
            };
            let mut rest = Vec::new();
            for l in &disjunct {
                match l {
                    Literal::Tester { constructor, term } => {
                        let t = fl.term(term)?;
                        let rel = fl.rels.tester(fl.sig, constructor)?;
                        fl.atoms.push(Atom::new(rel, vec![t]));
                    }
                    Literal::Eq(a, b) => rest.push(Literal::Eq(fl.term(a)?, fl.term(b)?)),
                    Literal::Diseq(a, b) => rest.push(Literal::Diseq(fl.term(a)?, fl.term(b)?)),
                }
            }
            let body: Vec<Atom> = c.body.iter().map(|a| fl.atom(a)).collect::<Result<_, _>>()?;
            let head = match &c.head {
                Head::False => Head::False,
                Head::Atom(a) => Head::Atom(fl.atom(a)?),
            };
            let mut atoms = fl.atoms;
            atoms.extend(body);
            let universals = fl.clause_vars;
            clauses.push(Clause {
                universals,
                constraint: conjunction(rest),
                body: atoms,
                head,
                ..c.clone()
            });
        }
    }
    stats.generated = rels.names.values().cloned().collect();
    clauses.extend(rels.rules);
    stats.output_clauses = clauses.len();
    Ok((ChcSystem::new(sig, clauses), stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::list_signature;
    use crate::ir::Var;

    fn sig_with_p() -> Signature {
        let mut sig = list_signature();
        sig.add_predicate("P", vec!["List".into(), "List".into()], PredicateOrigin::User)
            .unwrap();
        sig.add_predicate("Q", vec!["List".into()], PredicateOrigin::User)
            .unwrap();
        sig
    }

    fn x() -> Term {
        Term::var("x", "List")
    }
    fn y() -> Term {
        Term::var("y", "List")
    }

    #[test]
    fn selectors_become_relations() {
        let c = Clause::new(
            [Var::new("x", "List"), Var::new("y", "List")],
            Formula::Not(Box::new(Formula::Lit(Literal::Eq(
                Term::Select("car".into(), Box::new(x())),
                Term::Select("car".into(), Box::new(y())),
            )))),
            vec![],
            Head::Atom(Atom::new("P", vec![x(), y()])),
        );
        let sys = ChcSystem::new(sig_with_p(), vec![c]);
        let (nnf, _) = super::super::to_nnf(&sys);
        let (out, stats) = eliminate_testers_selectors(&nnf).unwrap();
        assert_eq!(
            out.clauses[0].to_string(),
            "a1 != a2 & car_rel(x,a1) & car_rel(y,a2) -> P(x,y)"
        );
        assert_eq!(out.clauses[1].to_string(), "x = cons(y1,y2) -> car_rel(x,y1)");
        assert_eq!(stats.generated, ["car_rel"]);
        assert!(out.clauses.iter().all(|c| !c.terms().iter().any(|t| t.has_selector())));
    }

    #[test]
    fn testers_become_relations() {
        let c = Clause::new(
            [Var::new("x", "List")],
            Formula::Lit(Literal::Tester {
                constructor: "cons".into(),
                term: x(),
            }),
            vec![],
            Head::Atom(Atom::new("Q", vec![x()])),
        );
        let (out, _) = eliminate_testers_selectors(&ChcSystem::new(sig_with_p(), vec![c])).unwrap();
        assert_eq!(out.clauses[0].to_string(), "cons?_rel(x) -> Q(x)");
        assert_eq!(out.clauses[1].to_string(), "x = cons(y1,y2) -> cons?_rel(x)");
    }

    #[test]
    fn untouched_without_selectors() {
        let c = Clause::new([Var::new("x", "List")], Formula::True, vec![], Head::Atom(Atom::new("Q", vec![x()])));
        let sys = ChcSystem::new(sig_with_p(), vec![c]);
        let (out, stats) = eliminate_testers_selectors(&sys).unwrap();
        assert_eq!(out, sys);
        assert!(stats.generated.is_empty());
    }
}
