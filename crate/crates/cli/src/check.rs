use std::fmt;

use horncat_core::automata::{build_automata, check_herbrand_model, HerbrandCheckReport};
use horncat_core::model::{verify_model, FiniteModel, Verification};

use crate::solve::{Prepared, SolveError};

/// Result of checking a user-supplied model against a script.
#[derive(Debug, Clone)]
pub struct ModelCheck {
    /// Evaluation of the preprocessed clauses in the model.
    pub verification: Verification,
    /// Herbrand check of the original clauses, run when the model passes.
    pub herbrand: Option<HerbrandCheckReport>,
}

impl ModelCheck {
    pub fn passed(&self) -> bool {
        self.verification.is_ok() && self.herbrand.as_ref().is_some_and(|h| h.passed())
    }
}

impl fmt::Display for ModelCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.verification {
            Verification::Ok => writeln!(f, "model satisfies every preprocessed clause")?,
            Verification::CounterInstance { clause, assignment } => {
                write!(f, "model violates clause {clause} with")?;
                for (v, e) in assignment {
                    write!(f, " {v}={e}")?;
                }
                writeln!(f)?;
            }
        }
        if let Some(h) = &self.herbrand {
            write!(f, "{h}")?;
        }
        Ok(())
    }
}

/// Parses `model_text` over the preprocessed signature and checks it.
/// Anything from the first `automaton` line on is ignored, so the output of
/// `solve --out` can be passed back unchanged.
pub fn check_model_text(
    prepared: &Prepared,
    model_text: &str,
    check_height: usize,
) -> Result<ModelCheck, SolveError> {
    let system = &prepared.preprocessed;
    let model_part: String = model_text
        .lines()
        .take_while(|l| !l.trim_start().starts_with("automaton "))
        .map(|l| format!("{l}\n"))
        .collect();
    let model = FiniteModel::parse(&model_part, &system.signature)
        .map_err(|e| SolveError::ModelText(e.to_string()))?;
    let verification = verify_model(system, &model)?;
    let herbrand = if verification.is_ok() {
        let automata = build_automata(&model, &system.signature, false)?;
        Some(check_herbrand_model(&prepared.original, &automata, check_height)?)
    } else {
        None
    };
    Ok(ModelCheck {
        verification,
        herbrand,
    })
}
