//! Direct check of `M |= C` by enumerating every variable assignment.

use std::collections::BTreeMap;

use super::finite::{FiniteModel, ModelError};
use crate::ir::{ChcSystem, Clause, Formula, Head, Literal, Term};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verification {
    Ok,
    /// The first clause (by index) with a falsifying assignment, and that
    /// assignment in the clause's quantifier order.
    CounterInstance {
        clause: usize,
        assignment: Vec<(String, usize)>,
    },
}

impl Verification {
    pub fn is_ok(&self) -> bool {
        matches!(self, Verification::Ok)
    }
}

type Env = BTreeMap<String, usize>;

fn eval(model: &FiniteModel, t: &Term, env: &Env) -> Result<usize, ModelError> {
    match t {
        Term::Var(v) => env
            .get(&v.name)
            .copied()
            .ok_or_else(|| ModelError::UnboundVariable(v.name.clone())),
        Term::App(f, args) => {
            let vals = args
                .iter()
                .map(|a| eval(model, a, env))
                .collect::<Result<Vec<_>, _>>()?;
            let table = model
                .functions
                .get(f)
                .ok_or_else(|| ModelError::MissingFunction(f.clone()))?;
            let mut idx = 0;
            for (v, s) in vals.iter().zip(&table.args) {
                idx = idx * model.size_of(s) + v;
            }
            table.values.get(idx).copied().ok_or_else(|| ModelError::BadTable {
                name: f.clone(),
                message: "table is not total".into(),
            })
        }
        Term::Select(s, _) => Err(ModelError::MissingFunction(s.clone())),
    }
}

/// Equalities are identity of elements; testers have no finite-model
/// meaning and are rejected.
fn eval_formula(model: &FiniteModel, f: &Formula, env: &Env, clause: usize) -> Result<bool, ModelError> {
    Ok(match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Lit(Literal::Eq(a, b)) => eval(model, a, env)? == eval(model, b, env)?,
        Formula::Lit(Literal::Diseq(a, b)) => eval(model, a, env)? != eval(model, b, env)?,
        Formula::Lit(Literal::Tester { .. }) => return Err(ModelError::NotConstraintFree(clause)),
        Formula::Not(g) => !eval_formula(model, g, env, clause)?,
        Formula::And(gs) => {
            for g in gs {
                if !eval_formula(model, g, env, clause)? {
                    return Ok(false);
                }
            }
            true
        }
        Formula::Or(gs) => {
            for g in gs {
                if eval_formula(model, g, env, clause)? {
                    return Ok(true);
                }
            }
            false
        }
    })
}

fn atom_holds(model: &FiniteModel, a: &crate::ir::Atom, env: &Env) -> Result<bool, ModelError> {
    let table = model
        .predicates
        .get(&a.predicate)
        .ok_or_else(|| ModelError::MissingPredicate(a.predicate.clone()))?;
    let vals = a
        .args
        .iter()
        .map(|t| eval(model, t, env))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(table.tuples.contains(&vals))
}

fn clause_holds(model: &FiniteModel, c: &Clause, env: &Env, index: usize) -> Result<bool, ModelError> {
    if !eval_formula(model, &c.constraint, env, index)? {
        return Ok(true);
    }
    for a in &c.body {
        if !atom_holds(model, a, env)? {
            return Ok(true);
        }
    }
    match &c.head {
        Head::False => Ok(false),
        Head::Atom(a) => atom_holds(model, a, env),
    }
}

/// Walks all assignments of `vars[i..]` in lexicographic order; returns the
/// first one falsifying the clause.
fn search(
    model: &FiniteModel,
    c: &Clause,
    index: usize,
    vars: &[(String, usize)],
    env: &mut Env,
) -> Result<Option<Env>, ModelError> {
    let Some(((name, size), rest)) = vars.split_first() else {
        return Ok(if clause_holds(model, c, env, index)? {
            None
        } else {
            Some(env.clone())
        });
    };
    for v in 0..*size {
        env.insert(name.clone(), v);
        if let Some(bad) = search(model, c, index, rest, env)? {
            return Ok(Some(bad));
        }
    }
    env.remove(name);
    Ok(None)
}

/// Checks every clause under every assignment of its universally quantified
/// variables to domain elements.
pub fn verify_model(system: &ChcSystem, model: &FiniteModel) -> Result<Verification, ModelError> {
    model.check_against(&system.signature)?;
    for (index, c) in system.clauses.iter().enumerate() {
        if !c.existentials.is_empty() {
            return Err(ModelError::NotConstraintFree(index));
        }
        let vars: Vec<(String, usize)> = c
            .universals
            .iter()
            .map(|(n, s)| (n.clone(), model.size_of(s)))
            .collect();
        if let Some(env) = search(model, c, index, &vars, &mut Env::new())? {
            let assignment = c
                .universals
                .keys()
                .map(|n| (n.clone(), env[n]))
                .collect();
            return Ok(Verification::CounterInstance {
                clause: index,
                assignment,
            });
        }
    }
    Ok(Verification::Ok)
}
