use std::fmt;
use std::path::{Path, PathBuf};
use std::time::Duration;

use tracing::warn;

use crate::config::RunConfig;
use crate::solve::{solve, SolveError, Verdict};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusEntry {
    pub name: String,
    pub expected: String,
    /// The verdict keyword, or `error: ...`.
    pub actual: String,
    pub elapsed: Duration,
    /// Sum of the domain sizes of the model, for `sat`.
    pub model_size: Option<usize>,
}

impl CorpusEntry {
    pub fn matches(&self) -> bool {
        self.expected == self.actual
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CorpusSummary {
    pub entries: Vec<CorpusEntry>,
    /// Scripts without a readable sidecar.
    pub skipped: Vec<PathBuf>,
}

impl CorpusSummary {
    pub fn mismatches(&self) -> usize {
        self.entries.iter().filter(|e| !e.matches()).count()
    }

    pub fn count(&self, verdict: &str) -> usize {
        self.entries.iter().filter(|e| e.actual == verdict).count()
    }
}

impl fmt::Display for CorpusSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<20} {:<8} {:<8} {:>10} {:>5}", "fixture", "expected", "actual", "time", "size")?;
        for e in &self.entries {
            let size = e.model_size.map(|s| s.to_string()).unwrap_or_else(|| "-".into());
            let mark = if e.matches() { "" } else { "  MISMATCH" };
            writeln!(
                f,
                "{:<20} {:<8} {:<8} {:>9.3}s {:>5}{mark}",
                e.name,
                e.expected,
                e.actual,
                e.elapsed.as_secs_f64(),
                size
            )?;
        }
        writeln!(
            f,
            "{} sat, {} unsat, {} unknown, {} mismatched, {} skipped",
            self.count("sat"),
            self.count("unsat"),
            self.count("unknown"),
            self.mismatches(),
            self.skipped.len()
        )
    }
}

/// Solves every `.smt2` file directly in `dir` (sorted by name) whose
/// `<name>.expected` sidecar exists, comparing against its first line.
pub fn run_corpus(dir: &Path, template: &RunConfig) -> Result<CorpusSummary, SolveError> {
    let io = |source| SolveError::Io {
        path: dir.to_path_buf(),
        source,
    };
    let mut scripts: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(io)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "smt2"))
        .collect();
    scripts.sort();
    let mut summary = CorpusSummary::default();
    for script in scripts {
        let sidecar = script.with_extension("expected");
        let expected = match std::fs::read_to_string(&sidecar) {
            Ok(text) => text.lines().next().unwrap_or("").trim().to_string(),
            Err(_) => {
                warn!(script = %script.display(), "no sidecar, skipping");
                summary.skipped.push(script);
                continue;
            }
        };
        let config = RunConfig {
            input: script.clone(),
            ..template.clone()
        };
        let name = script
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let (actual, elapsed, model_size) = match solve(&config) {
            Ok(out) => {
                let size = match &out.verdict {
                    Verdict::Sat(s) => Some(s.model.total_size()),
                    _ => None,
                };
                (out.verdict.keyword().to_string(), out.elapsed, size)
            }
            Err(e) => (format!("error: {e}"), Duration::ZERO, None),
        };
        summary.entries.push(CorpusEntry {
            name,
            expected,
            actual,
            elapsed,
            model_size,
        });
    }
    Ok(summary)
}
