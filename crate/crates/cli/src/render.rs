use std::fmt::Write as _;
use std::path::PathBuf;

use horncat_core::frontend::emit_script;

use crate::config::RunConfig;
use crate::solve::{SolveOutput, Verdict};

/// Text and files produced for a verdict. Nothing here depends on timing, so
/// equal runs render byte-identical output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rendered {
    pub stdout: String,
    pub exit_code: i32,
    /// Files to write, in order.
    pub files: Vec<(PathBuf, String)>,
}

/// Renders the solution body (model and automata) shown after `sat`.
fn sat_body(output: &SolveOutput) -> String {
    let Verdict::Sat(sat) = &output.verdict else {
        return String::new();
    };
    let mut body = String::new();
    let _ = writeln!(
        body,
        "# model with cardinalities {}, total size {}",
        sat.cardinality,
        sat.model.total_size()
    );
    body.push_str(&sat.model.to_string());
    let checked = sat.herbrand.effective_height();
    if checked < sat.herbrand.height {
        let _ = writeln!(
            body,
            "# herbrand check passed up to height {checked} (requested {})",
            sat.herbrand.height
        );
    } else {
        let _ = writeln!(body, "# herbrand check passed up to height {checked}");
    }
    for a in sat.automata.values() {
        body.push('\n');
        body.push_str(&a.to_string());
    }
    body
}

pub fn render_verdict(output: &SolveOutput, config: &RunConfig) -> Rendered {
    let mut stdout = format!("{}\n", output.verdict.keyword());
    let mut files = Vec::new();
    if let Some(path) = &config.emit_preprocessed {
        files.push((path.clone(), emit_script(&output.prepared.preprocessed).to_string()));
    }
    let exit_code = match &output.verdict {
        Verdict::Sat(_) => {
            let body = sat_body(output);
            match &config.out {
                Some(path) => files.push((path.clone(), body)),
                None => stdout.push_str(&body),
            }
            0
        }
        Verdict::Unsat(derivation) => {
            match &config.emit_derivation {
                Some(path) => files.push((path.clone(), derivation.to_string())),
                None => stdout.push_str(&derivation.to_string()),
            }
            0
        }
        Verdict::Unknown(info) => {
            let _ = writeln!(
                stdout,
                "# no model with total cardinality <= {}; no refutation at height <= {}",
                info.models_exhausted_to, info.refuter_exhausted_to
            );
            2
        }
    };
    Rendered {
        stdout,
        exit_code,
        files,
    }
}
