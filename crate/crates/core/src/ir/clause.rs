use std::fmt;

use indexmap::IndexMap;

use super::signature::Signature;
use super::term::{Atom, Formula, Substitution, Term, Var};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Head {
    False,
    Atom(Atom),
}

impl Head {
    pub fn atom(&self) -> Option<&Atom> {
        match self {
            Head::False => None,
            Head::Atom(a) => Some(a),
        }
    }
}

/// `forall universals. exists existentials. constraint & body -> head`.
///
/// The existential map is only non-empty between clausification and
/// Skolemization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clause {
    pub universals: IndexMap<String, String>,
    pub existentials: IndexMap<String, String>,
    pub constraint: Formula,
    pub body: Vec<Atom>,
    pub head: Head,
    /// Which input command or pass produced this clause.
    pub origin: String,
}

impl Clause {
    pub fn new(
        universals: impl IntoIterator<Item = Var>,
        constraint: Formula,
        body: Vec<Atom>,
        head: Head,
    ) -> Self {
        Clause {
            universals: universals.into_iter().map(|v| (v.name, v.sort)).collect(),
            existentials: IndexMap::new(),
            constraint,
            body,
            head,
            origin: String::new(),
        }
    }

    pub fn with_origin(mut self, origin: impl Into<String>) -> Self {
        self.origin = origin.into();
        self
    }

    pub fn is_query(&self) -> bool {
        matches!(self.head, Head::False)
    }

    /// No constraint and no selector terms: the form the model finder and
    /// refuter accept.
    pub fn is_constraint_free(&self) -> bool {
        self.constraint.is_true()
            && self.existentials.is_empty()
            && self.atoms().all(|a| a.args.iter().all(|t| !t.has_selector()))
    }

    /// Body atoms followed by the head atom, if any.
    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.body.iter().chain(self.head.atom())
    }

    /// Every term at the top level of an atom or a constraint literal.
    pub fn terms(&self) -> Vec<&Term> {
        let mut out: Vec<&Term> = self.atoms().flat_map(|a| a.args.iter()).collect();
        out.extend(self.constraint.terms());
        out
    }

    /// Variables in order of first occurrence (head last).
    pub fn occurring_vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        for t in self.constraint.terms() {
            t.collect_vars(&mut out);
        }
        for a in self.atoms() {
            for t in &a.args {
                t.collect_vars(&mut out);
            }
        }
        out
    }

    pub fn substitute(&self, sub: &Substitution) -> Clause {
        Clause {
            universals: self.universals.clone(),
            existentials: self.existentials.clone(),
            constraint: self.constraint.substitute(sub),
            body: self.body.iter().map(|a| a.substitute(sub)).collect(),
            head: match &self.head {
                Head::False => Head::False,
                Head::Atom(a) => Head::Atom(a.substitute(sub)),
            },
            origin: self.origin.clone(),
        }
    }

    /// Drops quantified variables that no longer occur.
    pub fn prune_variables(&mut self) {
        let used: Vec<String> = self.occurring_vars().into_iter().map(|v| v.name).collect();
        self.universals.retain(|n, _| used.contains(n));
        self.existentials.retain(|n, _| used.contains(n));
    }

    pub fn universal_vars(&self) -> Vec<Var> {
        self.universals
            .iter()
            .map(|(n, s)| Var::new(n.clone(), s.clone()))
            .collect()
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if !self.constraint.is_true() {
            parts.push(self.constraint.to_string());
        }
        parts.extend(self.body.iter().map(|a| a.to_string()));
        if !self.existentials.is_empty() {
            write!(f, "exists ")?;
            for (i, (n, s)) in self.existentials.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{n}:{s}")?;
            }
            write!(f, ". ")?;
        }
        if parts.is_empty() {
            write!(f, "true")?;
        } else {
            write!(f, "{}", parts.join(" & "))?;
        }
        match &self.head {
            Head::False => write!(f, " -> false"),
            Head::Atom(a) => write!(f, " -> {a}"),
        }
    }
}

/// A finite set of clauses over a signature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChcSystem {
    pub signature: Signature,
    pub clauses: Vec<Clause>,
}

impl ChcSystem {
    pub fn new(signature: Signature, clauses: Vec<Clause>) -> Self {
        ChcSystem { signature, clauses }
    }

    pub fn is_constraint_free(&self) -> bool {
        self.clauses.iter().all(Clause::is_constraint_free)
    }

    pub fn queries(&self) -> impl Iterator<Item = (usize, &Clause)> {
        self.clauses.iter().enumerate().filter(|(_, c)| c.is_query())
    }

    pub fn definite(&self) -> impl Iterator<Item = (usize, &Clause)> {
        self.clauses.iter().enumerate().filter(|(_, c)| !c.is_query())
    }
}

impl fmt::Display for ChcSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.clauses.iter().enumerate() {
            writeln!(f, "[{i}] {c}")?;
        }
        Ok(())
    }
}
