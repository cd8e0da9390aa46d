use std::path::PathBuf;
use std::time::Duration;

/// Settings for one `solve` run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub input: PathBuf,
    /// Largest total cardinality tried by the model finder.
    pub max_card: usize,
    /// Largest term height used by the refuter.
    pub refute_height: usize,
    /// Term height for the Herbrand check of a found model.
    pub check_height: usize,
    /// Term height for the model/automaton agreement check.
    pub theorem1_height: usize,
    pub timeout: Duration,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub emit_preprocessed: Option<PathBuf>,
    pub emit_derivation: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(input: impl Into<PathBuf>) -> Self {
        RunConfig {
            input: input.into(),
            max_card: 8,
            refute_height: 6,
            check_height: 4,
            theorem1_height: 5,
            timeout: Duration::from_secs(300),
            seed: 0,
            out: None,
            emit_preprocessed: None,
            emit_derivation: None,
        }
    }
}
