use std::collections::BTreeSet;

use indexmap::IndexMap;

use super::finite::{tuples_over, FiniteModel, FunctionTable, PredicateTable};
use crate::ir::Signature;

/// Renumbers every domain so that elements are labelled in the order in which
/// constructor terms first reach them: all terms of height 1, then height 2,
/// and so on, constructors in declaration order and argument tuples
/// lexicographic in the new labels. Elements no constructor term reaches keep
/// their relative order after the reachable ones.
///
/// Isomorphic models with the same constructor tables up to renaming come out
/// identical, which makes search results independent of solver choices that
/// only permute elements.
pub fn canonicalize(model: &FiniteModel, sig: &Signature) -> FiniteModel {
    let mut order: IndexMap<String, Vec<usize>> = model
        .domains
        .keys()
        .map(|s| (s.clone(), Vec::new()))
        .collect();
    loop {
        let snapshot = order.clone();
        let mut changed = false;
        for sort in sig.sorts() {
            for c in sig.constructors_of(sort) {
                let decl = sig.constructor(c).expect("constructor");
                let reached: Vec<&Vec<usize>> = decl.args.iter().map(|s| &snapshot[s]).collect();
                let sizes: Vec<usize> = reached.iter().map(|r| r.len()).collect();
                for idx in tuples_over(&sizes) {
                    let args: Vec<usize> = idx.iter().zip(&reached).map(|(&i, r)| r[i]).collect();
                    let Some(v) = model.apply(c, &args) else {
                        continue;
                    };
                    let list = order.get_mut(sort).expect("sort domain");
                    if !list.contains(&v) {
                        list.push(v);
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    for (sort, list) in order.iter_mut() {
        for v in 0..model.size_of(sort) {
            if !list.contains(&v) {
                list.push(v);
            }
        }
    }
    // new label of each old element
    let relabel: IndexMap<&str, Vec<usize>> = order
        .iter()
        .map(|(s, list)| {
            let mut inv = vec![0; list.len()];
            for (new, &old) in list.iter().enumerate() {
                inv[old] = new;
            }
            (s.as_str(), inv)
        })
        .collect();
    let mut out = FiniteModel {
        domains: model.domains.clone(),
        ..FiniteModel::default()
    };
    for (name, table) in &model.functions {
        let values = tuples_over(&model.sizes(&table.args))
            .into_iter()
            .map(|new_args| {
                let old_args: Vec<usize> = new_args
                    .iter()
                    .zip(&table.args)
                    .map(|(&a, s)| order[s][a])
                    .collect();
                let old = model.apply(name, &old_args).expect("total table");
                relabel[table.result.as_str()][old]
            })
            .collect();
        out.functions.insert(
            name.clone(),
            FunctionTable {
                args: table.args.clone(),
                result: table.result.clone(),
                values,
            },
        );
    }
    for (name, table) in &model.predicates {
        let tuples: BTreeSet<Vec<usize>> = table
            .tuples
            .iter()
            .map(|t| {
                t.iter()
                    .zip(&table.args)
                    .map(|(&v, s)| relabel[s.as_str()][v])
                    .collect()
            })
            .collect();
        out.predicates.insert(
            name.clone(),
            PredicateTable {
                args: table.args.clone(),
                tuples,
            },
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::nat_signature;
    use crate::ir::PredicateOrigin;

    #[test]
    fn constants_come_first() {
        let mut sig = nat_signature();
        sig.add_predicate("even", vec!["Nat".into()], PredicateOrigin::User)
            .unwrap();
        // Z = 2, S = 2 -> 0 -> 1 -> 2
        let text = "sort Nat = {0,1,2}\nfun Z: ->2\nfun S: 0->1, 1->2, 2->0\npred even = {(2)}\n";
        let model = FiniteModel::parse(text, &sig).unwrap();
        let canon = canonicalize(&model, &sig);
        assert_eq!(
            canon.to_string(),
            "sort Nat = {0,1,2}\nfun Z: ->0\nfun S: 0->1, 1->2, 2->0\npred even = {(0)}\n"
        );
        assert_eq!(canonicalize(&canon, &sig), canon);
    }
}
