//! Refutation certificates and an independent replayer.

use std::fmt;

use thiserror::Error;

use super::chain::ground_constraint_holds;
use crate::ir::{Atom, ChcSystem, Head, Substitution, Term};

/// One ground clause instance. `fact` is `None` for the final query step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub fact: Option<Atom>,
    pub clause: usize,
    pub assignment: Vec<(String, Term)>,
    /// Earlier steps whose facts match the clause body, in body order.
    pub premises: Vec<usize>,
}

/// A derivation of `false`: fact steps in dependency order followed by one
/// query step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    pub steps: Vec<Step>,
}

impl Derivation {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.fact {
            Some(a) => write!(f, "{a}")?,
            None => write!(f, "FALSE")?,
        }
        write!(f, " by clause {} with {{", self.clause)?;
        for (i, (v, t)) in self.assignment.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}:={t}")?;
        }
        write!(f, "}} using [")?;
        for (i, p) in self.premises.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.steps.iter().enumerate() {
            writeln!(f, "[{i}] {s}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("step {step}: {message}")]
pub struct ReplayError {
    pub step: usize,
    pub message: String,
}

fn is_constructor_term(t: &Term, system: &ChcSystem) -> bool {
    match t {
        Term::App(c, args) => {
            system.signature.constructor(c).is_some_and(|d| d.args.len() == args.len())
                && args.iter().all(|a| is_constructor_term(a, system))
        }
        _ => false,
    }
}

/// Re-checks every step against the clauses of `system`: the assignment must
/// give a ground constructor term of the right sort to every universal, the
/// instantiated body must equal the premise facts, the constraint must hold
/// syntactically, and the instantiated head must be the step's fact. The
/// last step must be the only query step.
pub fn replay_derivation(system: &ChcSystem, derivation: &Derivation) -> Result<(), ReplayError> {
    let n = derivation.steps.len();
    if n == 0 {
        return Err(ReplayError {
            step: 0,
            message: "empty derivation".into(),
        });
    }
    for (i, step) in derivation.steps.iter().enumerate() {
        let fail = |message: String| ReplayError { step: i, message };
        let clause = system
            .clauses
            .get(step.clause)
            .ok_or_else(|| fail(format!("no clause {}", step.clause)))?;
        if !clause.existentials.is_empty() {
            return Err(fail("clause has existential variables".into()));
        }
        let mut sub = Substitution::new();
        for (v, t) in &step.assignment {
            let sort = clause
                .universals
                .get(v)
                .ok_or_else(|| fail(format!("`{v}` is not a variable of the clause")))?;
            if !is_constructor_term(t, system) {
                return Err(fail(format!("`{t}` is not a ground constructor term")));
            }
            if t.sort(&system.signature) != Some(sort.as_str()) {
                return Err(fail(format!("`{t}` does not have sort `{sort}`")));
            }
            if sub.insert(v.clone(), t.clone()).is_some() {
                return Err(fail(format!("`{v}` assigned twice")));
            }
        }
        for v in clause.occurring_vars() {
            if !sub.contains_key(&v.name) {
                return Err(fail(format!("`{}` is unassigned", v.name)));
            }
        }
        if !clause.constraint.is_true()
            && !ground_constraint_holds(&clause.constraint.substitute(&sub), &system.signature)
        {
            return Err(fail("constraint does not hold".into()));
        }
        if step.premises.len() != clause.body.len() {
            return Err(fail(format!(
                "{} premises for a body of {} atoms",
                step.premises.len(),
                clause.body.len()
            )));
        }
        for (atom, &p) in clause.body.iter().zip(&step.premises) {
            if p >= i {
                return Err(fail(format!("premise {p} is not an earlier step")));
            }
            let premise = derivation.steps[p]
                .fact
                .as_ref()
                .ok_or_else(|| fail(format!("premise {p} derives no fact")))?;
            let expected = atom.substitute(&sub);
            if &expected != premise {
                return Err(fail(format!("body atom {expected} does not match premise {premise}")));
            }
        }
        match (&clause.head, &step.fact, i + 1 == n) {
            (Head::False, None, true) => {}
            (Head::Atom(h), Some(fact), false) => {
                let expected = h.substitute(&sub);
                if &expected != fact {
                    return Err(fail(format!("head {expected} differs from claimed fact {fact}")));
                }
            }
            (_, _, true) => return Err(fail("last step must instantiate a query clause".into())),
            _ => return Err(fail("only the last step may derive false".into())),
        }
    }
    Ok(())
}
