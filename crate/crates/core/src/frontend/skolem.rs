use indexmap::IndexMap;

use crate::ir::{ChcSystem, SignatureError, Substitution, Term};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkolemFunction {
    pub arg_sorts: Vec<String>,
    pub result: String,
    /// Index of the clause the existential variable came from.
    pub clause: usize,
}

/// Skolem functions introduced by [`skolemize_existentials`], by name.
pub type SkolemRecord = IndexMap<String, SkolemFunction>;

/// Replaces each existential `v` of a clause with universals `u1..un` by a
/// fresh function `f_v(u1,..,un)`, registered in the signature as a Skolem
/// function (never a constructor). Systems without existentials come back
/// unchanged.
pub fn skolemize_existentials(
    system: &ChcSystem,
) -> Result<(ChcSystem, SkolemRecord), SignatureError> {
    let mut out = system.clone();
    let mut record = SkolemRecord::new();
    for (i, clause) in out.clauses.iter_mut().enumerate() {
        if clause.existentials.is_empty() {
            continue;
        }
        let universals = clause.universal_vars();
        let arg_sorts: Vec<String> = universals.iter().map(|v| v.sort.clone()).collect();
        let args: Vec<Term> = universals.into_iter().map(Term::Var).collect();
        let mut sub = Substitution::new();
        for (v, sort) in &clause.existentials {
            let name = out.signature.fresh_name(&format!("f_{v}"));
            out.signature.add_skolem(&name, arg_sorts.clone(), sort)?;
            record.insert(
                name.clone(),
                SkolemFunction {
                    arg_sorts: arg_sorts.clone(),
                    result: sort.clone(),
                    clause: i,
                },
            );
            sub.insert(v.clone(), Term::App(name, args.clone()));
        }
        let mut replaced = clause.substitute(&sub);
        replaced.existentials.clear();
        *clause = replaced;
    }
    Ok((out, record))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{clausify, parse_script};

    const LE: &str = "(declare-datatypes ((Nat 0)) (((Z) (S (p Nat)))))
        (declare-fun le (Nat Nat) Bool)
        (assert (forall ((x Nat)) (le Z x)))
        (assert (not (exists ((x Nat)) (forall ((y Nat)) (le x y)))))
        (check-sat)";

    #[test]
    fn existentials_become_functions_of_universals() {
        let sys = clausify(&parse_script(LE).unwrap()).unwrap();
        let (sk, record) = skolemize_existentials(&sys).unwrap();
        assert_eq!(sk.clauses[1].to_string(), "le(x,f_y(x)) -> false");
        assert!(sk.clauses.iter().all(|c| c.existentials.is_empty()));
        assert_eq!(record.len(), 1);
        assert_eq!(record["f_y"].arg_sorts, ["Nat"]);
        assert_eq!(record["f_y"].clause, 1);
        assert!(sk.signature.is_skolem("f_y"));
        assert!(!sk.signature.is_constructor("f_y"));
    }

    #[test]
    fn idempotent() {
        let sys = clausify(&parse_script(LE).unwrap()).unwrap();
        let (once, _) = skolemize_existentials(&sys).unwrap();
        let (twice, record) = skolemize_existentials(&once).unwrap();
        assert_eq!(once, twice);
        assert!(record.is_empty());
    }
}
