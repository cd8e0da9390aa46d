//! Prints a clause system back in the input grammar.

use super::script::{Command, ConstructorDecl, DatatypeDecl, Field, Script};
use super::sexpr::SExpr;
use crate::ir::{ChcSystem, Clause, Formula, Head, Literal, Term};

fn app(head: &str, args: Vec<SExpr>) -> SExpr {
    if args.is_empty() {
        return SExpr::sym(head);
    }
    let mut items = vec![SExpr::sym(head)];
    items.extend(args);
    SExpr::list(items)
}

pub fn term_to_sexpr(t: &Term) -> SExpr {
    match t {
        Term::Var(v) => SExpr::sym(v.name.clone()),
        Term::App(f, args) => app(f, args.iter().map(term_to_sexpr).collect()),
        Term::Select(s, inner) => app(s, vec![term_to_sexpr(inner)]),
    }
}

pub fn formula_to_sexpr(f: &Formula) -> SExpr {
    match f {
        Formula::True => SExpr::sym("true"),
        Formula::False => SExpr::sym("false"),
        Formula::Lit(Literal::Eq(a, b)) => app("=", vec![term_to_sexpr(a), term_to_sexpr(b)]),
        Formula::Lit(Literal::Diseq(a, b)) => {
            app("distinct", vec![term_to_sexpr(a), term_to_sexpr(b)])
        }
        Formula::Lit(Literal::Tester { constructor, term }) => SExpr::list(vec![
            SExpr::list(vec![SExpr::sym("_"), SExpr::sym("is"), SExpr::sym(constructor.clone())]),
            term_to_sexpr(term),
        ]),
        Formula::Not(inner) => app("not", vec![formula_to_sexpr(inner)]),
        Formula::And(ps) => app("and", ps.iter().map(formula_to_sexpr).collect()),
        Formula::Or(ps) => app("or", ps.iter().map(formula_to_sexpr).collect()),
    }
}

fn binders<'a>(vars: impl Iterator<Item = (&'a String, &'a String)>) -> SExpr {
    SExpr::list(
        vars.map(|(n, s)| SExpr::list(vec![SExpr::sym(n.clone()), SExpr::sym(s.clone())]))
            .collect(),
    )
}

pub fn clause_to_sexpr(c: &Clause) -> SExpr {
    let mut body: Vec<SExpr> = Vec::new();
    if !c.constraint.is_true() {
        body.push(formula_to_sexpr(&c.constraint));
    }
    body.extend(
        c.body
            .iter()
            .map(|a| app(&a.predicate, a.args.iter().map(term_to_sexpr).collect())),
    );
    let body = match body.len() {
        0 => SExpr::sym("true"),
        1 => body.pop().unwrap(),
        _ => app("and", body),
    };
    if !c.existentials.is_empty() {
        // forall u. exists e. body -> false  ==  not exists u. forall e. body
        let inner = app("forall", vec![binders(c.existentials.iter()), body]);
        let inner = if c.universals.is_empty() {
            inner
        } else {
            app("exists", vec![binders(c.universals.iter()), inner])
        };
        return app("not", vec![inner]);
    }
    let head = match &c.head {
        Head::False => SExpr::sym("false"),
        Head::Atom(a) => app(&a.predicate, a.args.iter().map(term_to_sexpr).collect()),
    };
    let imp = app("=>", vec![body, head]);
    if c.universals.is_empty() {
        imp
    } else {
        app("forall", vec![binders(c.universals.iter()), imp])
    }
}

/// A script declaring the system's datatypes, every predicate (generated
/// ones included) and Skolem function, and one assertion per clause.
pub fn emit_script(system: &ChcSystem) -> Script {
    let sig = &system.signature;
    let datatypes = sig
        .sorts()
        .map(|sort| DatatypeDecl {
            name: sort.to_string(),
            constructors: sig
                .constructors_of(sort)
                .iter()
                .map(|c| {
                    let decl = sig.constructor(c).expect("constructor");
                    ConstructorDecl {
                        name: c.clone(),
                        fields: decl
                            .args
                            .iter()
                            .enumerate()
                            .map(|(i, s)| Field {
                                selector: decl
                                    .selectors
                                    .get(i)
                                    .filter(|n| !n.is_empty())
                                    .cloned()
                                    .unwrap_or_else(|| format!("{c}_{i}")),
                                sort: s.clone(),
                            })
                            .collect(),
                    }
                })
                .collect(),
        })
        .collect();
    let mut commands = vec![Command::DeclareDatatypes(datatypes)];
    for (name, decl) in sig.skolems() {
        commands.push(Command::DeclareFun {
            name: name.to_string(),
            args: decl.args.clone(),
            result: decl.result.clone(),
        });
    }
    for (name, decl) in sig.predicates() {
        commands.push(Command::DeclareFun {
            name: name.to_string(),
            args: decl.args.clone(),
            result: "Bool".into(),
        });
    }
    for c in &system.clauses {
        commands.push(Command::Assert(clause_to_sexpr(c)));
    }
    commands.push(Command::CheckSat);
    Script { commands }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{clausify, parse_script};

    #[test]
    fn emitted_script_clausifies_to_same_system() {
        let text = "(declare-datatypes ((Nat 0)) (((Z) (S (p Nat)))))
            (declare-fun le (Nat Nat) Bool)
            (assert (forall ((x Nat)) (le Z x)))
            (assert (forall ((x Nat) (y Nat)) (=> (and (le x y) (distinct x (S y))) (le (S x) (S y)))))
            (assert (not (exists ((x Nat)) (forall ((y Nat)) (le x y)))))
            (check-sat)";
        let sys = clausify(&parse_script(text).unwrap()).unwrap();
        let emitted = emit_script(&sys).to_string();
        let again = clausify(&parse_script(&emitted).unwrap()).unwrap();
        let strip = |s: &ChcSystem| s.clauses.iter().map(|c| c.to_string()).collect::<Vec<_>>();
        assert_eq!(strip(&sys), strip(&again));
        assert_eq!(sys.signature, again.signature);
    }
}
