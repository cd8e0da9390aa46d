use super::diseq::encode_disequalities;
use super::dnf::split_dnf;
use super::nnf::to_nnf;
use super::report::{PassReport, PreprocessError};
use super::selectors::eliminate_testers_selectors;
use super::unify::eliminate_equalities;
use crate::ir::ChcSystem;

/// NNF, tester/selector relationalization, DNF split, equality elimination
/// and disequality encoding, in that order. The result is constraint-free:
/// every clause body is a conjunction of predicate atoms.
pub fn run_pipeline(system: &ChcSystem) -> Result<(ChcSystem, PassReport), PreprocessError> {
    let mut report = PassReport::default();
    let (s, stats) = to_nnf(system);
    report.passes.push(stats);
    let (s, stats) = eliminate_testers_selectors(&s)?;
    report.passes.push(stats);
    let (s, stats) = split_dnf(&s);
    report.passes.push(stats);
    let (s, stats) = eliminate_equalities(&s)?;
    report.passes.push(stats);
    let (mut s, stats) = encode_disequalities(&s)?;
    report.passes.push(stats);
    for c in &mut s.clauses {
        c.prune_variables();
    }
    debug_assert!(s.is_constraint_free());
    tracing::debug!(clauses = s.clauses.len(), "preprocessing done");
    Ok((s, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::frontend::load_system;

    fn pipelined(text: &str) -> Vec<String> {
        let (sys, _) = load_system(text).unwrap();
        let (out, _) = run_pipeline(&sys).unwrap();
        assert!(out.is_constraint_free());
        out.clauses.iter().map(|c| c.to_string()).collect()
    }

    #[test]
    fn even_is_already_constraint_free() {
        assert_eq!(
            pipelined(fixtures::EVEN),
            [
                "true -> even(Z)",
                "even(x) -> even(S(S(x)))",
                "even(x) & even(S(x)) -> false"
            ]
        );
    }

    #[test]
    fn incdec_golden() {
        assert_eq!(
            pipelined(fixtures::INCDEC),
            [
                "true -> inc(Z,S(Z))",
                "inc(x1,y1) -> inc(S(x1),S(y1))",
                "true -> dec(S(Z),Z)",
                "dec(x1,y1) -> dec(S(x1),S(y1))",
                "inc(x,y) & dec(x,y) -> false"
            ]
        );
    }

    #[test]
    fn recursive_even_matches_asserted_even_up_to_renaming() {
        assert_eq!(
            pipelined(fixtures::EVEN_REC),
            [
                "true -> even(Z)",
                "even(k) -> even(S(S(k)))",
                "even(x) & even(S(x)) -> false"
            ]
        );
    }

    #[test]
    fn constraint_free_input_unchanged() {
        let (sys, _) = load_system(fixtures::EVEN).unwrap();
        let (out, _) = run_pipeline(&sys).unwrap();
        assert_eq!(out, sys);
    }
}
