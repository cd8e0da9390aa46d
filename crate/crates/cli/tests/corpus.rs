use std::path::{Path, PathBuf};
use std::time::Duration;

use horncat::{run_corpus, RunConfig};

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn template() -> RunConfig {
    RunConfig {
        max_card: 6,
        refute_height: 5,
        timeout: Duration::from_secs(60),
        ..RunConfig::new("")
    }
}

fn copy(name: &str, to: &Path, expected: &str) {
    std::fs::copy(fixtures().join(format!("{name}.smt2")), to.join(format!("{name}.smt2"))).unwrap();
    std::fs::write(to.join(format!("{name}.expected")), format!("{expected}\n")).unwrap();
}

#[test]
fn bundled_corpus_matches_sidecars() {
    let summary = run_corpus(&fixtures(), &template()).unwrap();
    assert_eq!(summary.mismatches(), 0, "{summary}");
    assert_eq!(summary.count("sat"), 5, "{summary}");
    assert_eq!(summary.count("unsat"), 1);
    assert_eq!(summary.count("unknown"), 2);
}

#[test]
fn empty_directory_gives_empty_summary() {
    let dir = tempfile::tempdir().unwrap();
    let summary = run_corpus(dir.path(), &template()).unwrap();
    assert!(summary.entries.is_empty());
    assert_eq!(summary.mismatches(), 0);
}

#[test]
fn wrong_sidecar_is_flagged_and_missing_one_skipped() {
    let dir = tempfile::tempdir().unwrap();
    copy("even", dir.path(), "unsat");
    copy("example3", dir.path(), "unsat");
    std::fs::copy(fixtures().join("diag.smt2"), dir.path().join("diag.smt2")).unwrap();
    let summary = run_corpus(dir.path(), &template()).unwrap();
    assert_eq!(summary.entries.len(), 2);
    assert_eq!(summary.mismatches(), 1);
    assert_eq!(summary.skipped.len(), 1);
    assert!(summary.to_string().contains("MISMATCH"));
}
