use std::fmt;

use thiserror::Error;

use crate::ir::{SignatureError, Substitution};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PreprocessError {
    #[error("clause {clause}: cannot eliminate equality `{literal}` between a Skolem term and a non-variable")]
    SkolemEquality { clause: usize, literal: String },
    #[error("clause {clause}: disequality `{literal}` involves a Skolem term")]
    SkolemDisequality { clause: usize, literal: String },
    #[error(transparent)]
    Signature(#[from] SignatureError),
}

/// What one pass did.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PassStats {
    pub pass: &'static str,
    pub input_clauses: usize,
    pub output_clauses: usize,
    /// Predicates this pass added to the signature.
    pub generated: Vec<String>,
    /// Most general unifiers applied, by input clause index.
    pub substitutions: Vec<(usize, Substitution)>,
    /// Input clauses removed, with the reason.
    pub dropped: Vec<(usize, String)>,
    pub notes: Vec<String>,
}

impl PassStats {
    pub fn new(pass: &'static str, input_clauses: usize) -> Self {
        PassStats {
            pass,
            input_clauses,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PassReport {
    pub passes: Vec<PassStats>,
}

impl PassReport {
    pub fn generated(&self) -> impl Iterator<Item = &str> {
        self.passes
            .iter()
            .flat_map(|p| p.generated.iter().map(String::as_str))
    }

    pub fn notes(&self) -> impl Iterator<Item = &str> {
        self.passes.iter().flat_map(|p| p.notes.iter().map(String::as_str))
    }
}

impl fmt::Display for PassReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.passes {
            write!(f, "{}: {} -> {} clauses", p.pass, p.input_clauses, p.output_clauses)?;
            if !p.generated.is_empty() {
                write!(f, ", generated {}", p.generated.join(", "))?;
            }
            if !p.dropped.is_empty() {
                write!(f, ", dropped {}", p.dropped.len())?;
            }
            writeln!(f)?;
            for (i, reason) in &p.dropped {
                writeln!(f, "  dropped clause {i}: {reason}")?;
            }
            for n in &p.notes {
                writeln!(f, "  note: {n}")?;
            }
        }
        Ok(())
    }
}
