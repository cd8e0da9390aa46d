use std::path::PathBuf;
use std::time::Duration;

use horncat::{render_verdict, solve, solve_with_model_hook, RunConfig, SolveError, Verdict};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn quick(name: &str) -> RunConfig {
    RunConfig {
        max_card: 4,
        refute_height: 5,
        timeout: Duration::from_secs(60),
        ..RunConfig::new(fixture(name))
    }
}

#[test]
fn even_is_sat_with_two_elements() {
    let config = quick("even.smt2");
    let out = solve(&config).unwrap();
    let Verdict::Sat(sat) = &out.verdict else {
        panic!("expected sat, got {}", out.verdict.keyword());
    };
    assert_eq!(sat.model.total_size(), 2);
    let rendered = render_verdict(&out, &config);
    assert_eq!(rendered.exit_code, 0);
    assert!(rendered.stdout.starts_with("sat\n"));
    assert!(rendered.stdout.contains("automaton even : Nat"));
}

#[test]
fn example3_is_unsat_with_two_steps() {
    let dir = tempfile::tempdir().unwrap();
    let config = RunConfig {
        emit_derivation: Some(dir.path().join("proof.txt")),
        ..quick("example3.smt2")
    };
    let out = solve(&config).unwrap();
    let Verdict::Unsat(d) = &out.verdict else {
        panic!("expected unsat");
    };
    assert_eq!(d.len(), 2);
    let rendered = render_verdict(&out, &config);
    assert_eq!(rendered.stdout, "unsat\n");
    assert_eq!(rendered.exit_code, 0);
    let (path, text) = &rendered.files[0];
    assert_eq!(path, &dir.path().join("proof.txt"));
    assert!(text.lines().last().unwrap().starts_with("[1] FALSE by clause"));
}

#[test]
fn diag_is_unknown_with_exit_code_two() {
    let config = quick("diag.smt2");
    let out = solve(&config).unwrap();
    let Verdict::Unknown(info) = &out.verdict else {
        panic!("expected unknown, got {}", out.verdict.keyword());
    };
    assert_eq!(info.models_exhausted_to, 4);
    assert_eq!(info.refuter_exhausted_to, 5);
    assert_eq!(render_verdict(&out, &config).exit_code, 2);
}

#[test]
fn corrupted_model_is_never_reported() {
    let config = quick("even.smt2");
    let result = solve_with_model_hook(&config, &mut |m| {
        let even = m.predicates.get_mut("even").unwrap();
        even.tuples.insert(vec![1]);
    });
    assert!(matches!(result, Err(SolveError::Verification(_))), "{result:?}");
}

#[test]
fn output_is_deterministic() {
    for name in ["even.smt2", "incdec.smt2", "example3.smt2"] {
        let config = RunConfig { seed: 3, ..quick(name) };
        let a = render_verdict(&solve(&config).unwrap(), &config);
        let b = render_verdict(&solve(&config).unwrap(), &config);
        assert_eq!(a, b, "{name}");
    }
}

#[test]
fn refuter_gets_slices_when_models_come_first() {
    // Large cardinality bound: the model lane alone would never finish.
    let config = RunConfig {
        max_card: 50,
        refute_height: 50,
        timeout: Duration::from_secs(3600),
        ..RunConfig::new(fixture("example3.smt2"))
    };
    let out = solve(&config).unwrap();
    assert_eq!(out.verdict.keyword(), "unsat");
}

#[test]
fn missing_file_is_an_error() {
    let config = RunConfig::new(fixture("does_not_exist.smt2"));
    assert!(matches!(solve(&config), Err(SolveError::Io { .. })));
}
