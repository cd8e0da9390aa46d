use std::fmt;

use super::clause::{ChcSystem, Clause};
use super::signature::Signature;
use super::term::{Atom, Formula, Literal, Term};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub clause: usize,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "clause {}: {}", self.clause, self.message)
    }
}

/// Reports every sort, arity and scoping violation, one diagnostic each.
pub fn check_well_sorted(system: &ChcSystem) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for (i, clause) in system.clauses.iter().enumerate() {
        let mut checker = ClauseChecker {
            sig: &system.signature,
            clause,
            messages: Vec::new(),
        };
        checker.check();
        out.extend(checker.messages.into_iter().map(|message| Diagnostic {
            clause: i,
            message,
        }));
    }
    out
}

struct ClauseChecker<'a> {
    sig: &'a Signature,
    clause: &'a Clause,
    messages: Vec<String>,
}

impl ClauseChecker<'_> {
    fn check(&mut self) {
        for (name, sort) in self.clause.universals.iter().chain(&self.clause.existentials) {
            if !self.sig.has_sort(sort) {
                self.messages
                    .push(format!("variable `{name}` has undeclared sort `{sort}`"));
            }
        }
        for name in self.clause.existentials.keys() {
            if self.clause.universals.contains_key(name) {
                self.messages.push(format!(
                    "variable `{name}` is both universally and existentially quantified"
                ));
            }
        }
        self.formula(&self.clause.constraint);
        for atom in &self.clause.body {
            self.atom(atom);
        }
        if let Some(atom) = self.clause.head.atom() {
            self.atom(atom);
        }
    }

    fn formula(&mut self, f: &Formula) {
        match f {
            Formula::True | Formula::False => {}
            Formula::Lit(l) => self.literal(l),
            Formula::Not(inner) => self.formula(inner),
            Formula::And(ps) | Formula::Or(ps) => ps.iter().for_each(|p| self.formula(p)),
        }
    }

    fn literal(&mut self, l: &Literal) {
        match l {
            Literal::Eq(a, b) | Literal::Diseq(a, b) => {
                let (sa, sb) = (self.term(a), self.term(b));
                if let (Some(sa), Some(sb)) = (sa, sb) {
                    if sa != sb {
                        self.messages
                            .push(format!("sort mismatch in `{l}`: `{sa}` vs `{sb}`"));
                    }
                }
            }
            Literal::Tester { constructor, term } => {
                let st = self.term(term);
                match self.sig.constructor(constructor) {
                    None => self
                        .messages
                        .push(format!("tester of undeclared constructor `{constructor}`")),
                    Some(decl) => {
                        if let Some(st) = st {
                            if st != decl.result {
                                self.messages.push(format!(
                                    "tester `{constructor}?` applied to term of sort `{st}`"
                                ));
                            }
                        }
                    }
                }
            }
        }
    }

    fn atom(&mut self, atom: &Atom) {
        let sorts: Vec<Option<String>> = atom.args.iter().map(|t| self.term(t)).collect();
        let Some(decl) = self.sig.predicate(&atom.predicate) else {
            self.messages
                .push(format!("undeclared predicate `{}`", atom.predicate));
            return;
        };
        if decl.args.len() != atom.args.len() {
            self.messages.push(format!(
                "predicate `{}` expects {} arguments, got {}",
                atom.predicate,
                decl.args.len(),
                atom.args.len()
            ));
            return;
        }
        for (i, (expected, got)) in decl.args.iter().zip(sorts).enumerate() {
            if let Some(got) = got {
                if &got != expected {
                    self.messages.push(format!(
                        "argument {i} of `{}` has sort `{got}`, expected `{expected}`",
                        atom.predicate
                    ));
                }
            }
        }
    }

    /// Returns the sort of `t` when it could be determined.
    fn term(&mut self, t: &Term) -> Option<String> {
        match t {
            Term::Var(v) => {
                let declared = self
                    .clause
                    .universals
                    .get(&v.name)
                    .or_else(|| self.clause.existentials.get(&v.name));
                match declared {
                    None => {
                        self.messages
                            .push(format!("variable `{}` is not quantified", v.name));
                    }
                    Some(s) if s != &v.sort => {
                        self.messages.push(format!(
                            "variable `{}` used at sort `{}` but declared `{s}`",
                            v.name, v.sort
                        ));
                    }
                    Some(_) => {}
                }
                Some(v.sort.clone())
            }
            Term::App(f, args) => {
                let sorts: Vec<Option<String>> = args.iter().map(|a| self.term(a)).collect();
                let Some(decl) = self.sig.function(f) else {
                    self.messages.push(format!("undeclared function `{f}`"));
                    return None;
                };
                if decl.args.len() != args.len() {
                    self.messages.push(format!(
                        "`{f}` expects {} arguments, got {}",
                        decl.args.len(),
                        args.len()
                    ));
                } else {
                    for (i, (expected, got)) in decl.args.iter().zip(sorts).enumerate() {
                        if let Some(got) = got {
                            if &got != expected {
                                self.messages.push(format!(
                                    "argument {i} of `{f}` has sort `{got}`, expected `{expected}`"
                                ));
                            }
                        }
                    }
                }
                Some(decl.result.clone())
            }
            Term::Select(s, inner) => {
                let got = self.term(inner);
                let Some(decl) = self.sig.selector(s) else {
                    self.messages.push(format!("undeclared selector `{s}`"));
                    return None;
                };
                if let Some(got) = got {
                    if got != decl.sort {
                        self.messages.push(format!(
                            "selector `{s}` applied to sort `{got}`, expected `{}`",
                            decl.sort
                        ));
                    }
                }
                Some(decl.result.clone())
            }
        }
    }
}
