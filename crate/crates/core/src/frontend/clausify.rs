//! Turns a validated script into clauses.
//!
//! Boolean bodies in positive position are expanded into a disjunction of
//! branches (constraint conjunction, predicate atoms, fresh variables); each
//! branch becomes one clause. Disjunctions made only of constraints are kept
//! as a single `Or` constraint and left to the DNF pass.

use std::collections::HashSet;

use itertools::Itertools;

use super::error::ClausifyError;
use super::script::{Command, Script};
use super::sexpr::SExpr;
use crate::ir::{
    check_well_sorted, Atom, ChcSystem, Clause, Formula, Head, Literal, PredicateOrigin,
    Signature, Term, Var,
};

#[derive(Debug, Clone, Default)]
struct Branch {
    constraint: Vec<Formula>,
    atoms: Vec<Atom>,
    universals: Vec<Var>,
    existentials: Vec<Var>,
}

impl Branch {
    fn join(&self, other: &Branch) -> Branch {
        let mut out = self.clone();
        out.constraint.extend(other.constraint.iter().cloned());
        out.atoms.extend(other.atoms.iter().cloned());
        out.universals.extend(other.universals.iter().cloned());
        out.existentials.extend(other.existentials.iter().cloned());
        out
    }
}

fn product(left: Vec<Branch>, right: Vec<Branch>) -> Vec<Branch> {
    left.iter()
        .cartesian_product(right.iter())
        .map(|(a, b)| a.join(b))
        .collect()
}

/// Where a boolean subformula sits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Polarity {
    /// Clause body: `exists` binds universals, `forall` is rejected.
    Body,
    /// Body of an asserted `(not ...)`: additionally `forall` binds
    /// existentials of the resulting query clause.
    NegatedBody,
}

/// Source-name bindings in scope plus the clause-wide set of used names.
#[derive(Default)]
struct Scope {
    bindings: Vec<(String, Term)>,
    used: HashSet<String>,
}

impl Scope {
    fn lookup(&self, name: &str) -> Option<&Term> {
        self.bindings
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|(_, t)| t)
    }

    /// Binds `name` to a fresh clause variable and returns it.
    fn bind_fresh(&mut self, name: &str, sort: &str, sig: &Signature) -> Var {
        let mut candidate = name.to_string();
        let mut i = 0;
        while self.used.contains(&candidate) || sig.is_declared(&candidate) {
            i += 1;
            candidate = format!("{name}_{i}");
        }
        self.used.insert(candidate.clone());
        let v = Var::new(candidate, sort);
        self.bindings.push((name.to_string(), Term::Var(v.clone())));
        v
    }
}

fn unsupported(e: &SExpr, message: impl Into<String>) -> ClausifyError {
    ClausifyError::Unsupported {
        pos: e.pos(),
        token: e.token(),
        message: message.into(),
    }
}

fn invalid(e: &SExpr, message: impl Into<String>) -> ClausifyError {
    ClausifyError::Invalid {
        pos: e.pos(),
        token: e.token(),
        message: message.into(),
    }
}

fn simplify_and(parts: Vec<Formula>) -> Formula {
    if parts.iter().any(|p| matches!(p, Formula::False)) {
        return Formula::False;
    }
    Formula::and(parts)
}

fn simplify_or(parts: Vec<Formula>) -> Formula {
    if parts.iter().any(Formula::is_true) {
        return Formula::True;
    }
    let mut rest: Vec<Formula> = parts
        .into_iter()
        .filter(|p| !matches!(p, Formula::False))
        .collect();
    match rest.len() {
        0 => Formula::False,
        1 => rest.pop().unwrap(),
        _ => Formula::Or(rest),
    }
}

fn simplify_not(f: Formula) -> Formula {
    match f {
        Formula::True => Formula::False,
        Formula::False => Formula::True,
        other => Formula::Not(Box::new(other)),
    }
}

struct Clausifier {
    sig: Signature,
}

impl Clausifier {
    fn is_predicate(&self, name: &str) -> bool {
        self.sig.predicate(name).is_some()
    }

    fn tester_constructor<'e>(&self, e: &'e SExpr) -> Option<&'e str> {
        match e {
            SExpr::Symbol(s, _) => s
                .strip_prefix("is-")
                .filter(|c| self.sig.is_constructor(c)),
            SExpr::List(items, _)
                if items.len() == 3
                    && items[0].as_symbol() == Some("_")
                    && items[1].as_symbol() == Some("is") =>
            {
                items[2].as_symbol()
            }
            _ => None,
        }
    }

    fn term(&self, e: &SExpr, scope: &Scope) -> Result<Term, ClausifyError> {
        match e {
            SExpr::Symbol(s, _) => {
                if let Some(t) = scope.lookup(s) {
                    return Ok(t.clone());
                }
                match self.sig.function(s) {
                    Some(d) if d.args.is_empty() => Ok(Term::constant(s.clone())),
                    _ => Err(invalid(e, "expected a term")),
                }
            }
            SExpr::List(items, _) => {
                let Some(head) = items.first().and_then(SExpr::as_symbol) else {
                    return Err(invalid(e, "expected a term"));
                };
                let args = &items[1..];
                if self.sig.function(head).is_some() {
                    let args = args
                        .iter()
                        .map(|a| self.term(a, scope))
                        .collect::<Result<Vec<_>, _>>()?;
                    Ok(Term::App(head.to_string(), args))
                } else if self.sig.selector(head).is_some() && args.len() == 1 {
                    Ok(Term::Select(head.to_string(), Box::new(self.term(&args[0], scope)?)))
                } else if head == "ite" {
                    Err(unsupported(e, "term-level ite"))
                } else {
                    Err(invalid(e, "expected a term"))
                }
            }
            SExpr::Numeral(..) => Err(unsupported(e, "numerals")),
        }
    }

    fn term_sort(&self, t: &Term) -> String {
        t.sort(&self.sig).unwrap_or_default().to_string()
    }

    /// Whether `e` is a constraint: no predicate atoms, quantifiers or match.
    fn is_pure(&self, e: &SExpr) -> bool {
        match e {
            SExpr::Symbol(s, _) => !self.is_predicate(s),
            SExpr::Numeral(..) => true,
            SExpr::List(items, _) => {
                if self.tester_constructor(&items[0]).is_some() {
                    return true;
                }
                match items[0].as_symbol() {
                    Some("and" | "or" | "not" | "=>" | "ite") => {
                        items[1..].iter().all(|a| self.is_pure(a))
                    }
                    Some("=" | "distinct") => true,
                    Some(h) => !self.is_predicate(h) && !matches!(h, "match" | "forall" | "exists"),
                    None => false,
                }
            }
        }
    }

    fn term_list(&self, args: &[SExpr], scope: &Scope) -> Result<Vec<Term>, ClausifyError> {
        args.iter().map(|a| self.term(a, scope)).collect()
    }

    fn constraint(&self, e: &SExpr, scope: &Scope) -> Result<Formula, ClausifyError> {
        match e {
            SExpr::Symbol(s, _) if s == "true" => Ok(Formula::True),
            SExpr::Symbol(s, _) if s == "false" => Ok(Formula::False),
            SExpr::List(items, _) => {
                let args = &items[1..];
                if let Some(c) = self.tester_constructor(&items[0]) {
                    return Ok(Formula::Lit(Literal::Tester {
                        constructor: c.to_string(),
                        term: self.term(&args[0], scope)?,
                    }));
                }
                let sub = |a: &SExpr| self.constraint(a, scope);
                match items[0].as_symbol().unwrap_or("") {
                    "and" => Ok(simplify_and(args.iter().map(sub).try_collect()?)),
                    "or" => Ok(simplify_or(args.iter().map(sub).try_collect()?)),
                    "not" => Ok(simplify_not(sub(&args[0])?)),
                    "=>" => {
                        let (last, init) = args.split_last().unwrap();
                        let mut parts: Vec<Formula> = init
                            .iter()
                            .map(|a| sub(a).map(simplify_not))
                            .try_collect()?;
                        parts.push(sub(last)?);
                        Ok(simplify_or(parts))
                    }
                    "ite" => {
                        let c = sub(&args[0])?;
                        Ok(simplify_or(vec![
                            simplify_and(vec![c.clone(), sub(&args[1])?]),
                            simplify_and(vec![simplify_not(c), sub(&args[2])?]),
                        ]))
                    }
                    "=" => {
                        let ts = self.equality_terms(e, args, scope)?;
                        Ok(Formula::and(
                            ts.iter()
                                .tuple_windows()
                                .map(|(a, b)| Formula::Lit(Literal::Eq(a.clone(), b.clone())))
                                .collect(),
                        ))
                    }
                    "distinct" => {
                        let ts = self.equality_terms(e, args, scope)?;
                        Ok(Formula::and(
                            ts.iter()
                                .tuple_combinations()
                                .map(|(a, b)| Formula::Lit(Literal::Diseq(a.clone(), b.clone())))
                                .collect(),
                        ))
                    }
                    _ => Err(unsupported(e, "boolean-valued function application")),
                }
            }
            _ => Err(unsupported(e, "boolean variable or constant")),
        }
    }

    fn equality_terms(
        &self,
        e: &SExpr,
        args: &[SExpr],
        scope: &Scope,
    ) -> Result<Vec<Term>, ClausifyError> {
        self.term_list(args, scope)
            .map_err(|_| unsupported(e, "equality between non-datatype values"))
    }

    fn atom(&self, e: &SExpr, scope: &Scope) -> Result<Option<Atom>, ClausifyError> {
        match e {
            SExpr::Symbol(s, _) if self.is_predicate(s) && scope.lookup(s).is_none() => {
                Ok(Some(Atom::new(s.clone(), Vec::new())))
            }
            SExpr::List(items, _) => match items[0].as_symbol() {
                Some(p) if self.is_predicate(p) => {
                    Ok(Some(Atom::new(p, self.term_list(&items[1..], scope)?)))
                }
                _ => Ok(None),
            },
            _ => Ok(None),
        }
    }

    /// Expands a positive boolean formula into its disjunction of branches.
    fn branches(
        &self,
        e: &SExpr,
        scope: &mut Scope,
        polarity: Polarity,
    ) -> Result<Vec<Branch>, ClausifyError> {
        if self.is_pure(e) {
            return Ok(match self.constraint(e, scope)? {
                Formula::False => Vec::new(),
                Formula::True => vec![Branch::default()],
                f => vec![Branch {
                    constraint: vec![f],
                    ..Branch::default()
                }],
            });
        }
        if let Some(atom) = self.atom(e, scope)? {
            return Ok(vec![Branch {
                atoms: vec![atom],
                ..Branch::default()
            }]);
        }
        let items = e.as_list().expect("symbols are pure or atoms");
        let args = &items[1..];
        match items[0].as_symbol().unwrap_or("") {
            "and" => {
                let mut acc = vec![Branch::default()];
                for a in args {
                    acc = product(acc, self.branches(a, scope, polarity)?);
                }
                Ok(acc)
            }
            "or" => {
                let mut acc = Vec::new();
                for a in args {
                    acc.extend(self.branches(a, scope, polarity)?);
                }
                Ok(acc)
            }
            "=>" => {
                let (last, init) = args.split_last().unwrap();
                if let Some(bad) = init.iter().find(|a| !self.is_pure(a)) {
                    return Err(unsupported(bad, "predicate in negative position"));
                }
                let mut acc: Vec<Branch> = Vec::new();
                for a in init {
                    let f = simplify_not(self.constraint(a, scope)?);
                    if !matches!(f, Formula::False) {
                        acc.push(Branch {
                            constraint: vec![f],
                            ..Branch::default()
                        });
                    }
                }
                acc.extend(self.branches(last, scope, polarity)?);
                Ok(acc)
            }
            "not" => Err(unsupported(e, "predicate in negative position")),
            "ite" => {
                if !self.is_pure(&args[0]) {
                    return Err(unsupported(&args[0], "predicate in ite condition"));
                }
                let c = self.constraint(&args[0], scope)?;
                let guard = |f: Formula| Branch {
                    constraint: vec![f],
                    ..Branch::default()
                };
                let then = product(vec![guard(c.clone())], self.branches(&args[1], scope, polarity)?);
                let other = product(
                    vec![guard(simplify_not(c))],
                    self.branches(&args[2], scope, polarity)?,
                );
                Ok(then.into_iter().chain(other).collect())
            }
            "exists" => self.quantified(e, args, scope, polarity, false),
            "forall" => match polarity {
                Polarity::NegatedBody => self.quantified(e, args, scope, polarity, true),
                Polarity::Body => Err(unsupported(e, "universal quantifier in a clause body")),
            },
            "match" => self.match_branches(args, scope, polarity),
            _ => Err(unsupported(e, "formula form")),
        }
    }

    fn quantified(
        &self,
        e: &SExpr,
        args: &[SExpr],
        scope: &mut Scope,
        polarity: Polarity,
        existential: bool,
    ) -> Result<Vec<Branch>, ClausifyError> {
        let mark = scope.bindings.len();
        let mut vars = Vec::new();
        for b in args[0].as_list().unwrap_or(&[]) {
            let pair = b.as_list().unwrap_or(&[]);
            let (name, sort) = (pair[0].as_symbol(), pair[1].as_symbol());
            let (Some(name), Some(sort)) = (name, sort) else {
                return Err(invalid(b, "binder"));
            };
            if !self.sig.has_sort(sort) {
                return Err(unsupported(b, "quantified variable of non-datatype sort"));
            }
            vars.push(scope.bind_fresh(name, sort, &self.sig));
        }
        let inner = self.branches(&args[1], scope, polarity);
        scope.bindings.truncate(mark);
        let mut inner = inner?;
        if existential && inner.len() > 1 {
            return Err(unsupported(
                e,
                "universally quantified disjunction under negation",
            ));
        }
        for b in &mut inner {
            let slot = if existential {
                &mut b.existentials
            } else {
                &mut b.universals
            };
            let mut all = vars.clone();
            all.append(slot);
            *slot = all;
        }
        Ok(inner)
    }

    /// One branch group per case; a wildcard case is guarded by "not an
    /// earlier constructor" tester literals, which later passes relationalize.
    fn match_branches(
        &self,
        args: &[SExpr],
        scope: &mut Scope,
        polarity: Polarity,
    ) -> Result<Vec<Branch>, ClausifyError> {
        let scrutinee = self.term(&args[0], scope)?;
        let sort = self.term_sort(&scrutinee);
        let mut seen: Vec<String> = Vec::new();
        let mut out = Vec::new();
        for case in args[1].as_list().unwrap_or(&[]) {
            let items = case.as_list().unwrap_or(&[]);
            let (pattern, body) = (&items[0], &items[1]);
            let mark = scope.bindings.len();
            let (ctor, fields): (Option<&str>, &[SExpr]) = match pattern {
                SExpr::Symbol(s, _) if self.sig.is_constructor(s) => (Some(s.as_str()), &[]),
                SExpr::Symbol(..) => (None, &[]),
                SExpr::List(p, _) => (p[0].as_symbol(), &p[1..]),
                _ => return Err(invalid(pattern, "pattern")),
            };
            let mut guard = Branch::default();
            match ctor {
                Some(c) => {
                    let decl = self.sig.constructor(c).expect("validated");
                    if decl.result != sort {
                        return Err(invalid(pattern, format!("pattern of sort `{}`", decl.result)));
                    }
                    if seen.iter().any(|s| s == c) {
                        continue;
                    }
                    seen.push(c.to_string());
                    let arg_sorts = decl.args.clone();
                    let mut sub_terms = Vec::new();
                    for (f, s) in fields.iter().zip(&arg_sorts) {
                        let name = f.as_symbol().ok_or_else(|| invalid(f, "pattern variable"))?;
                        let v = scope.bind_fresh(name, s, &self.sig);
                        guard.universals.push(v.clone());
                        sub_terms.push(Term::Var(v));
                    }
                    guard.constraint.push(Formula::Lit(Literal::Eq(
                        scrutinee.clone(),
                        Term::App(c.to_string(), sub_terms),
                    )));
                }
                None => {
                    let name = pattern.as_symbol().unwrap();
                    if name != "_" {
                        scope.bindings.push((name.to_string(), scrutinee.clone()));
                    }
                    let earlier: Vec<Formula> = seen
                        .iter()
                        .map(|c| {
                            Formula::Not(Box::new(Formula::Lit(Literal::Tester {
                                constructor: c.clone(),
                                term: scrutinee.clone(),
                            })))
                        })
                        .collect();
                    guard.constraint.extend(earlier);
                }
            }
            let inner = self.branches(body, scope, polarity);
            scope.bindings.truncate(mark);
            out.extend(product(vec![guard], inner?));
            if ctor.is_none() {
                break;
            }
            if seen.len() == self.sig.constructors_of(&sort).len() {
                break;
            }
        }
        Ok(out)
    }

    fn clause_from(
        &self,
        outer: &[Var],
        branch: Branch,
        head: Head,
        origin: &str,
    ) -> Clause {
        let mut clause = Clause::new(
            outer.iter().cloned().chain(branch.universals),
            Formula::and(branch.constraint),
            branch.atoms,
            head,
        )
        .with_origin(origin);
        clause.existentials = branch
            .existentials
            .into_iter()
            .map(|v| (v.name, v.sort))
            .collect();
        clause.prune_variables();
        clause
    }

    fn define_fun_rec(
        &self,
        name: &str,
        params: &[(String, String)],
        body: &SExpr,
        origin: &str,
    ) -> Result<Vec<Clause>, ClausifyError> {
        let mut scope = Scope::default();
        let vars: Vec<Var> = params
            .iter()
            .map(|(p, s)| scope.bind_fresh(p, s, &self.sig))
            .collect();
        let head = Head::Atom(Atom::new(
            name,
            vars.iter().cloned().map(Term::Var).collect(),
        ));
        let branches = self.branches(body, &mut scope, Polarity::Body)?;
        Ok(branches
            .into_iter()
            .map(|b| self.clause_from(&vars, b, head.clone(), origin))
            .collect())
    }

    fn assertion(&self, e: &SExpr, origin: &str) -> Result<Vec<Clause>, ClausifyError> {
        let mut scope = Scope::default();
        let mut outer = Vec::new();
        let mut cur = e;
        while cur.head() == Some("forall") {
            let items = cur.as_list().unwrap();
            for b in items[1].as_list().unwrap_or(&[]) {
                let pair = b.as_list().unwrap_or(&[]);
                let (Some(name), Some(sort)) = (pair[0].as_symbol(), pair[1].as_symbol()) else {
                    return Err(invalid(b, "binder"));
                };
                if !self.sig.has_sort(sort) {
                    return Err(unsupported(b, "quantified variable of non-datatype sort"));
                }
                outer.push(scope.bind_fresh(name, sort, &self.sig));
            }
            cur = &items[2];
        }
        self.assert_body(cur, &mut scope, &outer, origin)
    }

    fn assert_body(
        &self,
        e: &SExpr,
        scope: &mut Scope,
        outer: &[Var],
        origin: &str,
    ) -> Result<Vec<Clause>, ClausifyError> {
        let query = |scope: &mut Scope, body: &SExpr, polarity| -> Result<Vec<Clause>, ClausifyError> {
            Ok(self
                .branches(body, scope, polarity)?
                .into_iter()
                .map(|b| self.clause_from(outer, b, Head::False, origin))
                .collect())
        };
        if let Some(atom) = self.atom(e, scope)? {
            return Ok(vec![self.clause_from(outer, Branch::default(), Head::Atom(atom), origin)]);
        }
        match e.head() {
            Some("and") => {
                let mut out = Vec::new();
                for part in &e.as_list().unwrap()[1..] {
                    out.extend(self.assert_body(part, scope, outer, origin)?);
                }
                Ok(out)
            }
            Some("=>") => {
                let items = e.as_list().unwrap();
                let (last, init) = items[1..].split_last().unwrap();
                let body = if init.len() == 1 {
                    init[0].clone()
                } else {
                    let mut and = vec![SExpr::sym("and")];
                    and.extend(init.iter().cloned());
                    SExpr::List(and, e.pos())
                };
                let mut branches = self.branches(&body, scope, Polarity::Body)?;
                self.close_implication(last, &mut branches, scope, outer, origin)
            }
            Some("not") => {
                let inner = &e.as_list().unwrap()[1];
                let mut cur = inner;
                let mut vars = Vec::new();
                let mark = scope.bindings.len();
                while cur.head() == Some("exists") {
                    let items = cur.as_list().unwrap();
                    for b in items[1].as_list().unwrap_or(&[]) {
                        let pair = b.as_list().unwrap_or(&[]);
                        let (Some(name), Some(sort)) = (pair[0].as_symbol(), pair[1].as_symbol())
                        else {
                            return Err(invalid(b, "binder"));
                        };
                        if !self.sig.has_sort(sort) {
                            return Err(unsupported(b, "quantified variable of non-datatype sort"));
                        }
                        vars.push(scope.bind_fresh(name, sort, &self.sig));
                    }
                    cur = &items[2];
                }
                let mut all = outer.to_vec();
                all.extend(vars);
                let clauses = self
                    .branches(cur, scope, Polarity::NegatedBody)?
                    .into_iter()
                    .map(|b| self.clause_from(&all, b, Head::False, origin))
                    .collect();
                scope.bindings.truncate(mark);
                Ok(clauses)
            }
            _ if self.is_pure(e) => {
                let negated = SExpr::List(vec![SExpr::sym("not"), e.clone()], e.pos());
                query(scope, &negated, Polarity::Body)
            }
            _ => Err(unsupported(e, "assertion is not Horn-shaped")),
        }
    }

    /// Attaches the head of `body => head` to every body branch.
    fn close_implication(
        &self,
        head: &SExpr,
        branches: &mut Vec<Branch>,
        scope: &mut Scope,
        outer: &[Var],
        origin: &str,
    ) -> Result<Vec<Clause>, ClausifyError> {
        if let Some(atom) = self.atom(head, scope)? {
            return Ok(branches
                .drain(..)
                .map(|b| self.clause_from(outer, b, Head::Atom(atom.clone()), origin))
                .collect());
        }
        if head.head() == Some("and") {
            let mut out = Vec::new();
            for part in &head.as_list().unwrap()[1..] {
                let mut copy = branches.clone();
                out.extend(self.close_implication(part, &mut copy, scope, outer, origin)?);
            }
            return Ok(out);
        }
        if self.is_pure(head) {
            // body => phi  is  body & !phi => false
            let negated = simplify_not(self.constraint(head, scope)?);
            return Ok(match negated {
                Formula::False => Vec::new(),
                f => branches
                    .drain(..)
                    .map(|mut b| {
                        b.constraint.push(f.clone());
                        self.clause_from(outer, b, Head::False, origin)
                    })
                    .collect(),
            });
        }
        Err(unsupported(head, "clause head is not a predicate atom"))
    }
}

/// Builds the signature and clause system for a script. Existential
/// variables of negated-assertion queries are kept in the clauses'
/// existential maps; see [`super::skolemize_existentials`].
pub fn clausify(script: &Script) -> Result<ChcSystem, ClausifyError> {
    let mut sig = Signature::new();
    for d in script.datatypes() {
        sig.add_sort(&d.name)?;
    }
    for d in script.datatypes() {
        for c in &d.constructors {
            sig.add_constructor(&c.name, c.fields.iter().map(|f| f.sort.clone()).collect(), &d.name)?;
        }
    }
    for d in script.datatypes() {
        for c in &d.constructors {
            for (i, f) in c.fields.iter().enumerate() {
                sig.add_selector(&f.selector, &c.name, i)?;
            }
        }
    }
    sig.validate()?;
    for cmd in &script.commands {
        match cmd {
            Command::DeclareFun { name, args, result } if result == "Bool" => {
                sig.add_predicate(name, args.clone(), PredicateOrigin::User)?;
            }
            Command::DeclareFun { name, args, result } => {
                sig.add_skolem(name, args.clone(), result)?;
            }
            Command::DefineFunRec {
                name,
                params,
                result,
                body,
            } => {
                if result != "Bool" {
                    return Err(ClausifyError::Unsupported {
                        pos: body.pos(),
                        token: name.clone(),
                        message: "non-boolean recursive function".into(),
                    });
                }
                sig.add_predicate(name, params.iter().map(|(_, s)| s.clone()).collect(), PredicateOrigin::User)?;
            }
            _ => {}
        }
    }
    let cx = Clausifier { sig };
    let mut clauses = Vec::new();
    let mut asserts = 0;
    for cmd in &script.commands {
        match cmd {
            Command::DefineFunRec {
                name, params, body, ..
            } => {
                let origin = format!("define-fun-rec {name}");
                clauses.extend(cx.define_fun_rec(name, params, body, &origin)?);
            }
            Command::Assert(e) => {
                asserts += 1;
                clauses.extend(cx.assertion(e, &format!("assert #{asserts}"))?);
            }
            _ => {}
        }
    }
    let system = ChcSystem::new(cx.sig, clauses);
    if let Some(d) = check_well_sorted(&system).into_iter().next() {
        return Err(ClausifyError::IllSorted {
            clause: d.clause,
            message: d.message,
        });
    }
    Ok(system)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_script;

    fn clauses(text: &str) -> Vec<String> {
        let sys = clausify(&parse_script(text).unwrap()).unwrap();
        sys.clauses.iter().map(|c| c.to_string()).collect()
    }

    const NAT: &str = "(declare-datatypes ((Nat 0)) (((Z) (S (p Nat)))))";

    #[test]
    fn horn_asserts() {
        let got = clauses(&format!(
            "{NAT}(declare-fun even (Nat) Bool)
             (assert (even Z))
             (assert (forall ((x Nat)) (=> (even x) (even (S (S x))))))
             (assert (not (exists ((x Nat)) (and (even x) (even (S x))))))
             (check-sat)"
        ));
        assert_eq!(
            got,
            [
                "true -> even(Z)",
                "even(x) -> even(S(S(x)))",
                "even(x) & even(S(x)) -> false"
            ]
        );
    }

    #[test]
    fn match_definition_gives_one_clause_per_branch() {
        let got = clauses(&format!(
            "{NAT}(define-fun-rec even ((n Nat)) Bool
               (match n ((Z true) ((S m) (match m ((Z false) ((S k) (even k))))))))
             (assert (not (exists ((x Nat)) (and (even x) (even (S x))))))
             (check-sat)"
        ));
        assert_eq!(
            got,
            [
                "n = Z -> even(n)",
                "(n = S(m) & m = S(k)) & even(k) -> even(n)",
                "even(x) & even(S(x)) -> false"
            ]
        );
    }

    #[test]
    fn constant_function_and_false_query() {
        let got = clauses(&format!(
            "{NAT}(define-fun-rec f ((x Nat)) Bool true)
             (assert (not (exists ((x Nat)) (and (f x) false))))
             (check-sat)"
        ));
        assert_eq!(got, ["true -> f(x)"]);
    }

    #[test]
    fn wildcard_is_guarded_by_testers() {
        let sys = clausify(
            &parse_script(&format!(
                "{NAT}(define-fun-rec g ((n Nat)) Bool (match n ((Z false) (_ true))))(check-sat)"
            ))
            .unwrap(),
        )
        .unwrap();
        assert_eq!(sys.clauses.len(), 1);
        assert_eq!(sys.clauses[0].to_string(), "!Z?(n) -> g(n)");
    }

    #[test]
    fn forall_under_negation_becomes_existential() {
        let sys = clausify(
            &parse_script(&format!(
                "{NAT}(declare-fun le (Nat Nat) Bool)
                 (assert (not (exists ((x Nat)) (forall ((y Nat)) (le x y)))))
                 (check-sat)"
            ))
            .unwrap(),
        )
        .unwrap();
        let c = &sys.clauses[0];
        assert!(c.is_query());
        assert_eq!(c.universals.keys().collect::<Vec<_>>(), ["x"]);
        assert_eq!(c.existentials.keys().collect::<Vec<_>>(), ["y"]);
    }

    #[test]
    fn negative_predicate_is_unsupported() {
        let r = clausify(
            &parse_script(&format!(
                "{NAT}(define-fun-rec h ((n Nat)) Bool (not (h n)))(check-sat)"
            ))
            .unwrap(),
        );
        assert!(matches!(r, Err(ClausifyError::Unsupported { .. })));
    }

    #[test]
    fn non_boolean_recursive_function_is_unsupported() {
        let r = clausify(
            &parse_script(&format!(
                "{NAT}(define-fun-rec h ((n Nat)) Nat n)(check-sat)"
            ))
            .unwrap(),
        );
        assert!(matches!(r, Err(ClausifyError::Unsupported { .. })));
    }
}
