use std::collections::BTreeMap;
use std::fmt;

use super::signature::Signature;

/// A sorted variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var {
    pub name: String,
    pub sort: String,
}

impl Var {
    pub fn new(name: impl Into<String>, sort: impl Into<String>) -> Self {
        Var {
            name: name.into(),
            sort: sort.into(),
        }
    }
}

/// First-order terms over constructors and Skolem functions. `Select` is a
/// frontend-only form removed by preprocessing.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Var),
    App(String, Vec<Term>),
    Select(String, Box<Term>),
}

pub type Substitution = BTreeMap<String, Term>;

impl Term {
    pub fn var(name: impl Into<String>, sort: impl Into<String>) -> Term {
        Term::Var(Var::new(name, sort))
    }

    pub fn constant(name: impl Into<String>) -> Term {
        Term::App(name.into(), Vec::new())
    }

    pub fn app(name: impl Into<String>, args: Vec<Term>) -> Term {
        Term::App(name.into(), args)
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(_, args) => args.iter().all(Term::is_ground),
            Term::Select(_, t) => t.is_ground(),
        }
    }

    pub fn has_selector(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(_, args) => args.iter().any(Term::has_selector),
            Term::Select(..) => true,
        }
    }

    /// Whether any function application in this term satisfies `pred`.
    pub fn mentions_function(&self, pred: &impl Fn(&str) -> bool) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(f, args) => pred(f) || args.iter().any(|a| a.mentions_function(pred)),
            Term::Select(_, t) => t.mentions_function(pred),
        }
    }

    pub fn occurs(&self, name: &str) -> bool {
        match self {
            Term::Var(v) => v.name == name,
            Term::App(_, args) => args.iter().any(|a| a.occurs(name)),
            Term::Select(_, t) => t.occurs(name),
        }
    }

    pub fn collect_vars(&self, out: &mut Vec<Var>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone())
                }
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
            Term::Select(_, t) => t.collect_vars(out),
        }
    }

    pub fn substitute(&self, sub: &Substitution) -> Term {
        match self {
            Term::Var(v) => sub.get(&v.name).cloned().unwrap_or_else(|| self.clone()),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| a.substitute(sub)).collect()),
            Term::Select(s, t) => Term::Select(s.clone(), Box::new(t.substitute(sub))),
        }
    }

    /// The sort of this term, if it is well formed with respect to `sig`.
    pub fn sort<'a>(&'a self, sig: &'a Signature) -> Option<&'a str> {
        match self {
            Term::Var(v) => Some(&v.sort),
            Term::App(f, _) => sig.function(f).map(|d| d.result.as_str()),
            Term::Select(s, _) => sig.selector(s).map(|d| d.result.as_str()),
        }
    }

    /// Number of symbols along the longest root-to-leaf path; variables count 1.
    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
            Term::Select(_, t) => 1 + t.depth(),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{}", v.name),
            Term::App(c, args) if args.is_empty() => write!(f, "{c}"),
            Term::App(c, args) => {
                write!(f, "{c}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
            Term::Select(s, t) => write!(f, "{s}({t})"),
        }
    }
}

/// Constraint literals of the assertion language. Testers are positive;
/// negation lives in [`Formula::Not`] until NNF.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Literal {
    Eq(Term, Term),
    Diseq(Term, Term),
    Tester { constructor: String, term: Term },
}

impl Literal {
    fn terms(&self) -> Vec<&Term> {
        match self {
            Literal::Eq(a, b) | Literal::Diseq(a, b) => vec![a, b],
            Literal::Tester { term, .. } => vec![term],
        }
    }

    pub fn substitute(&self, sub: &Substitution) -> Literal {
        match self {
            Literal::Eq(a, b) => Literal::Eq(a.substitute(sub), b.substitute(sub)),
            Literal::Diseq(a, b) => Literal::Diseq(a.substitute(sub), b.substitute(sub)),
            Literal::Tester { constructor, term } => Literal::Tester {
                constructor: constructor.clone(),
                term: term.substitute(sub),
            },
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Eq(a, b) => write!(f, "{a} = {b}"),
            Literal::Diseq(a, b) => write!(f, "{a} != {b}"),
            Literal::Tester { constructor, term } => write!(f, "{constructor}?({term})"),
        }
    }
}

/// Quantifier-free boolean combination of constraint literals.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Lit(Literal),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
}

impl Formula {
    pub fn and(parts: Vec<Formula>) -> Formula {
        let mut flat = Vec::new();
        for p in parts {
            match p {
                Formula::True => {}
                Formula::And(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => Formula::True,
            1 => flat.pop().unwrap(),
            _ => Formula::And(flat),
        }
    }

    pub fn is_true(&self) -> bool {
        matches!(self, Formula::True)
    }

    /// True when the formula contains no disjunction or negation.
    pub fn is_conjunctive(&self) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Lit(_) => true,
            Formula::And(parts) => parts.iter().all(Formula::is_conjunctive),
            Formula::Not(_) | Formula::Or(_) => false,
        }
    }

    pub fn literals(&self) -> Vec<&Literal> {
        let mut out = Vec::new();
        self.walk_literals(&mut |l| out.push(l));
        out
    }

    pub fn walk_literals<'a>(&'a self, f: &mut impl FnMut(&'a Literal)) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Lit(l) => f(l),
            Formula::Not(inner) => inner.walk_literals(f),
            Formula::And(ps) | Formula::Or(ps) => ps.iter().for_each(|p| p.walk_literals(f)),
        }
    }

    pub fn terms(&self) -> Vec<&Term> {
        let mut out = Vec::new();
        self.walk_literals(&mut |l| out.extend(l.terms()));
        out
    }

    pub fn substitute(&self, sub: &Substitution) -> Formula {
        match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Lit(l) => Formula::Lit(l.substitute(sub)),
            Formula::Not(inner) => Formula::Not(Box::new(inner.substitute(sub))),
            Formula::And(ps) => Formula::And(ps.iter().map(|p| p.substitute(sub)).collect()),
            Formula::Or(ps) => Formula::Or(ps.iter().map(|p| p.substitute(sub)).collect()),
        }
    }

    /// Rewrites every term bottom-up through `f`.
    pub fn map_terms(&self, f: &mut impl FnMut(&Term) -> Term) -> Formula {
        match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Lit(l) => Formula::Lit(match l {
                Literal::Eq(a, b) => Literal::Eq(f(a), f(b)),
                Literal::Diseq(a, b) => Literal::Diseq(f(a), f(b)),
                Literal::Tester { constructor, term } => Literal::Tester {
                    constructor: constructor.clone(),
                    term: f(term),
                },
            }),
            Formula::Not(inner) => Formula::Not(Box::new(inner.map_terms(f))),
            Formula::And(ps) => Formula::And(ps.iter().map(|p| p.map_terms(f)).collect()),
            Formula::Or(ps) => Formula::Or(ps.iter().map(|p| p.map_terms(f)).collect()),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn join(f: &mut fmt::Formatter<'_>, ps: &[Formula], sep: &str) -> fmt::Result {
            write!(f, "(")?;
            for (i, p) in ps.iter().enumerate() {
                if i > 0 {
                    write!(f, " {sep} ")?;
                }
                write!(f, "{p}")?;
            }
            write!(f, ")")
        }
        match self {
            Formula::True => write!(f, "true"),
            Formula::False => write!(f, "false"),
            Formula::Lit(l) => write!(f, "{l}"),
            Formula::Not(inner) => write!(f, "!{inner}"),
            Formula::And(ps) => join(f, ps, "&"),
            Formula::Or(ps) => join(f, ps, "|"),
        }
    }
}

/// An uninterpreted predicate applied to terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(predicate: impl Into<String>, args: Vec<Term>) -> Self {
        Atom {
            predicate: predicate.into(),
            args,
        }
    }

    pub fn substitute(&self, sub: &Substitution) -> Atom {
        Atom {
            predicate: self.predicate.clone(),
            args: self.args.iter().map(|a| a.substitute(sub)).collect(),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.predicate)?;
        if !self.args.is_empty() {
            write!(f, "(")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{a}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}
