//! Heights and height-bounded slices of the Herbrand universe.

use indexmap::IndexMap;
use itertools::Itertools;
use thiserror::Error;

use super::signature::Signature;
use super::term::Term;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumerateError {
    #[error("undeclared sort `{0}`")]
    UndeclaredSort(String),
    #[error("term `{0}` is not ground")]
    NotGround(String),
    #[error("height bound must be at least 1")]
    ZeroHeight,
}

/// Height of a ground term: 1 for constants, otherwise one more than the
/// highest argument.
pub fn term_height(t: &Term) -> Result<usize, EnumerateError> {
    match t {
        Term::App(_, args) => {
            let mut h = 0;
            for a in args {
                h = h.max(term_height(a)?);
            }
            Ok(h + 1)
        }
        _ => Err(EnumerateError::NotGround(t.to_string())),
    }
}

/// Ground constructor terms of the given sort with height at most
/// `max_height`, height-major, then by constructor declaration order, then
/// lexicographically by argument position in this same order.
pub fn enumerate_ground_terms(
    sig: &Signature,
    sort: &str,
    max_height: usize,
) -> Result<Vec<Term>, EnumerateError> {
    if !sig.has_sort(sort) {
        return Err(EnumerateError::UndeclaredSort(sort.to_string()));
    }
    if max_height == 0 {
        return Err(EnumerateError::ZeroHeight);
    }
    let levels = GroundTerms::new(sig, max_height);
    Ok(levels.upto(sort, max_height).to_vec())
}

/// All ground terms of every sort up to a height bound. `terms[s]` is
/// ordered as in [`enumerate_ground_terms`]; `boundary[s][k]` is the number
/// of terms of height at most `k`.
#[derive(Debug, Clone)]
pub struct GroundTerms {
    terms: IndexMap<String, Vec<Term>>,
    boundary: IndexMap<String, Vec<usize>>,
    max_height: usize,
}

impl GroundTerms {
    pub fn new(sig: &Signature, max_height: usize) -> Self {
        let mut terms: IndexMap<String, Vec<Term>> =
            sig.sorts().map(|s| (s.to_string(), Vec::new())).collect();
        let mut boundary: IndexMap<String, Vec<usize>> =
            sig.sorts().map(|s| (s.to_string(), vec![0])).collect();

        for k in 1..=max_height {
            let mut fresh: IndexMap<String, Vec<Term>> = IndexMap::new();
            for sort in sig.sorts() {
                let mut new_terms = Vec::new();
                for ctor in sig.constructors_of(sort) {
                    let decl = sig.constructor(ctor).expect("constructor");
                    if decl.args.is_empty() {
                        if k == 1 {
                            new_terms.push(Term::constant(ctor.clone()));
                        }
                        continue;
                    }
                    if k == 1 {
                        continue;
                    }
                    // Arguments of height <= k-1, at least one of exactly k-1.
                    let prev_counts: Vec<usize> = decl
                        .args
                        .iter()
                        .map(|a| boundary[a.as_str()][k - 1])
                        .collect();
                    let older_counts: Vec<usize> = decl
                        .args
                        .iter()
                        .map(|a| boundary[a.as_str()][k - 2])
                        .collect();
                    if prev_counts.contains(&0) {
                        continue;
                    }
                    for idx in prev_counts.iter().map(|&c| 0..c).multi_cartesian_product() {
                        let tall = idx.iter().zip(&older_counts).any(|(i, o)| i >= o);
                        if !tall {
                            continue;
                        }
                        let args = idx
                            .iter()
                            .zip(&decl.args)
                            .map(|(&i, s)| terms[s.as_str()][i].clone())
                            .collect();
                        new_terms.push(Term::App(ctor.clone(), args));
                    }
                }
                fresh.insert(sort.to_string(), new_terms);
            }
            for (sort, new_terms) in fresh {
                let list = terms.get_mut(&sort).unwrap();
                list.extend(new_terms);
                boundary.get_mut(&sort).unwrap().push(list.len());
            }
        }
        GroundTerms {
            terms,
            boundary,
            max_height,
        }
    }

    pub fn max_height(&self) -> usize {
        self.max_height
    }

    /// Terms of `sort` with height at most `height` (clamped to the bound).
    pub fn upto(&self, sort: &str, height: usize) -> &[Term] {
        let h = height.min(self.max_height);
        let n = self.boundary[sort][h];
        &self.terms[sort][..n]
    }

    pub fn all(&self, sort: &str) -> &[Term] {
        &self.terms[sort]
    }
}

/// Number of ground terms of each sort with height at most `max_height`,
/// computed without materializing them (saturating).
pub fn count_ground_terms(sig: &Signature, max_height: usize) -> IndexMap<String, u128> {
    let mut upto: IndexMap<String, Vec<u128>> =
        sig.sorts().map(|s| (s.to_string(), vec![0])).collect();
    for k in 1..=max_height {
        let mut next = Vec::new();
        for sort in sig.sorts() {
            let mut n = upto[sort][k - 1];
            for ctor in sig.constructors_of(sort) {
                let decl = sig.constructor(ctor).unwrap();
                if decl.args.is_empty() {
                    if k == 1 {
                        n += 1;
                    }
                    continue;
                }
                if k == 1 {
                    continue;
                }
                let prod = |level: usize| {
                    decl.args
                        .iter()
                        .fold(1u128, |acc, a| acc.saturating_mul(upto[a.as_str()][level]))
                };
                n = n.saturating_add(prod(k - 1) - prod(k - 2));
            }
            next.push(n);
        }
        for (sort, n) in sig.sorts().zip(next).collect::<Vec<_>>() {
            upto.get_mut(sort).unwrap().push(n);
        }
    }
    upto.into_iter()
        .map(|(s, v)| (s, *v.last().unwrap()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{nat_signature, tree_signature};

    fn names(ts: &[Term]) -> Vec<String> {
        ts.iter().map(Term::to_string).collect()
    }

    #[test]
    fn heights() {
        let z = Term::constant("Z");
        assert_eq!(term_height(&z), Ok(1));
        let ssz = Term::app("S", vec![Term::app("S", vec![z.clone()])]);
        assert_eq!(term_height(&ssz), Ok(3));
        let leaf = Term::constant("leaf");
        let t = Term::app(
            "node",
            vec![leaf.clone(), Term::app("node", vec![leaf.clone(), leaf])],
        );
        assert_eq!(term_height(&t), Ok(3));
        assert!(matches!(
            term_height(&Term::var("x", "Nat")),
            Err(EnumerateError::NotGround(_))
        ));
    }

    #[test]
    fn nat_enumeration() {
        let sig = nat_signature();
        assert_eq!(
            names(&enumerate_ground_terms(&sig, "Nat", 3).unwrap()),
            ["Z", "S(Z)", "S(S(Z))"]
        );
        assert_eq!(names(&enumerate_ground_terms(&sig, "Nat", 1).unwrap()), ["Z"]);
    }

    #[test]
    fn tree_enumeration_order() {
        let sig = tree_signature();
        assert_eq!(
            names(&enumerate_ground_terms(&sig, "Tree", 3).unwrap()),
            [
                "leaf",
                "node(leaf,leaf)",
                "node(leaf,node(leaf,leaf))",
                "node(node(leaf,leaf),leaf)",
                "node(node(leaf,leaf),node(leaf,leaf))"
            ]
        );
    }

    #[test]
    fn errors() {
        let sig = nat_signature();
        assert_eq!(
            enumerate_ground_terms(&sig, "List", 2),
            Err(EnumerateError::UndeclaredSort("List".into()))
        );
        assert_eq!(
            enumerate_ground_terms(&sig, "Nat", 0),
            Err(EnumerateError::ZeroHeight)
        );
    }

    #[test]
    fn counts_match_materialized() {
        let sig = tree_signature();
        for h in 1..=4 {
            let counts = count_ground_terms(&sig, h);
            let terms = enumerate_ground_terms(&sig, "Tree", h).unwrap();
            assert_eq!(counts["Tree"], terms.len() as u128);
        }
    }
}
