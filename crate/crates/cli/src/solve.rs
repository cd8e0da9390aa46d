use std::collections::VecDeque;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use horncat_core::automata::{
    build_automata, check_herbrand_model, theorem1_check, AutomataError, HerbrandCheckReport,
    Theorem1Report, TreeAutomaton,
};
use horncat_core::frontend::{load_system, FrontendError, SkolemRecord};
use horncat_core::ir::ChcSystem;
use horncat_core::model::{
    cardinality_schedule, find_model_until, verify_model, CardinalityVector, FindOutcome,
    FiniteModel, ModelError, SearchBudget, Verification,
};
use horncat_core::preprocess::{run_pipeline, PassReport, PreprocessError};
use horncat_core::refuter::{
    bounded_refute_with, replay_derivation, ChainLimits, Derivation, LimitHit, RefuteOutcome,
};
use indexmap::IndexMap;
use thiserror::Error;
use tracing::{debug, info};

use crate::config::RunConfig;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Frontend(#[from] FrontendError),
    #[error(transparent)]
    Preprocess(#[from] PreprocessError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Automata(#[from] AutomataError),
    #[error("bad model file: {0}")]
    ModelText(String),
    /// A result failed an independent check. This is a bug in the solver and
    /// is never reported as a verdict.
    #[error("internal error, please report: {0}")]
    Verification(String),
}

/// A found model together with its automata and check reports.
#[derive(Debug, Clone)]
pub struct SatResult {
    pub cardinality: CardinalityVector,
    pub model: FiniteModel,
    /// Automata of the user predicates.
    pub automata: IndexMap<String, TreeAutomaton>,
    pub theorem1: Theorem1Report,
    pub herbrand: HerbrandCheckReport,
}

/// How far each search got before giving up.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownInfo {
    /// Largest total such that every cardinality vector up to it was
    /// searched exhaustively without finding a model.
    pub models_exhausted_to: usize,
    /// Largest height such that the refuter saturated at every height up to
    /// it without firing a query.
    pub refuter_exhausted_to: usize,
    pub elapsed: Duration,
}

#[derive(Debug, Clone)]
pub enum Verdict {
    Sat(Box<SatResult>),
    Unsat(Derivation),
    Unknown(UnknownInfo),
}

impl Verdict {
    pub fn keyword(&self) -> &'static str {
        match self {
            Verdict::Sat(_) => "sat",
            Verdict::Unsat(_) => "unsat",
            Verdict::Unknown(_) => "unknown",
        }
    }
}

/// The input after the frontend and the preprocessing pipeline.
#[derive(Debug, Clone)]
pub struct Prepared {
    /// Skolemized system, before preprocessing.
    pub original: ChcSystem,
    pub skolems: SkolemRecord,
    pub preprocessed: ChcSystem,
    pub report: PassReport,
}

#[derive(Debug, Clone)]
pub struct SolveOutput {
    pub prepared: Prepared,
    pub verdict: Verdict,
    pub elapsed: Duration,
}

pub fn load_and_preprocess(text: &str) -> Result<Prepared, SolveError> {
    let (original, skolems) = load_system(text)?;
    let (preprocessed, report) = run_pipeline(&original)?;
    Ok(Prepared {
        original,
        skolems,
        preprocessed,
        report,
    })
}

fn read_input(config: &RunConfig) -> Result<String, SolveError> {
    std::fs::read_to_string(&config.input).map_err(|source| SolveError::Io {
        path: config.input.clone(),
        source,
    })
}

pub fn solve(config: &RunConfig) -> Result<SolveOutput, SolveError> {
    solve_with_model_hook(config, &mut |_| {})
}

/// [`solve`] with a hook that may alter a found model before it is checked.
/// Used to test that corrupted models are caught.
pub fn solve_with_model_hook(
    config: &RunConfig,
    hook: &mut dyn FnMut(&mut FiniteModel),
) -> Result<SolveOutput, SolveError> {
    let text = read_input(config)?;
    let prepared = load_and_preprocess(&text)?;
    solve_system(prepared, config, hook)
}

/// Runs the portfolio on an already prepared system.
pub fn solve_system(
    prepared: Prepared,
    config: &RunConfig,
    hook: &mut dyn FnMut(&mut FiniteModel),
) -> Result<SolveOutput, SolveError> {
    let start = Instant::now();
    let verdict = Portfolio::new(&prepared, config, start).run(hook)?;
    info!(verdict = verdict.keyword(), elapsed = ?start.elapsed(), "solve finished");
    Ok(SolveOutput {
        prepared,
        verdict,
        elapsed: start.elapsed(),
    })
}

/// Shortest slice worth starting.
const MIN_SLICE: Duration = Duration::from_millis(5);
/// Budget of the first slice in each lane.
const FIRST_SLICE: Duration = Duration::from_millis(250);

/// Round-robin between the next cardinality vector and the next refuter
/// height. A lane's slice budget starts small and doubles each time a slice
/// runs out, and is always capped at an eighth of the remaining time; the
/// item that ran out is retried with the larger budget.
struct Portfolio<'a> {
    prepared: &'a Prepared,
    config: &'a RunConfig,
    deadline: Instant,
    budget: SearchBudget,
    vectors: VecDeque<CardinalityVector>,
    model_slice: Duration,
    next_height: usize,
    refuter_done: bool,
    refuter_slice: Duration,
    refuter_exhausted_to: usize,
    models_exhausted_to: usize,
}

impl<'a> Portfolio<'a> {
    fn new(prepared: &'a Prepared, config: &'a RunConfig, start: Instant) -> Self {
        let budget = SearchBudget {
            max_total: config.max_card,
            seed: Some(config.seed),
            ..SearchBudget::default()
        };
        let vectors = cardinality_schedule(&prepared.preprocessed.signature, &budget).into();
        Portfolio {
            prepared,
            config,
            deadline: start + config.timeout,
            budget,
            vectors,
            model_slice: FIRST_SLICE,
            next_height: 1,
            refuter_done: config.refute_height == 0,
            refuter_slice: FIRST_SLICE,
            refuter_exhausted_to: 0,
            models_exhausted_to: 0,
        }
    }

    fn slice_deadline(&self, budget: Duration) -> Option<Instant> {
        let now = Instant::now();
        let remaining = self.deadline.checked_duration_since(now)?;
        let slice = budget.min(remaining / 8);
        (slice >= MIN_SLICE).then(|| now + slice)
    }

    fn run(mut self, hook: &mut dyn FnMut(&mut FiniteModel)) -> Result<Verdict, SolveError> {
        let start = Instant::now();
        loop {
            let models_left = !self.vectors.is_empty();
            let refuter_left = !self.refuter_done;
            if !models_left && !refuter_left {
                break;
            }
            if models_left {
                let Some(slice) = self.slice_deadline(self.model_slice) else { break };
                if let Some(v) = self.model_step(slice, hook)? {
                    return Ok(v);
                }
            }
            if refuter_left {
                let Some(slice) = self.slice_deadline(self.refuter_slice) else { break };
                if let Some(v) = self.refuter_step(slice)? {
                    return Ok(v);
                }
            }
        }
        Ok(Verdict::Unknown(UnknownInfo {
            models_exhausted_to: self.models_exhausted_to,
            refuter_exhausted_to: self.refuter_exhausted_to,
            elapsed: start.elapsed(),
        }))
    }

    fn model_step(
        &mut self,
        slice: Instant,
        hook: &mut dyn FnMut(&mut FiniteModel),
    ) -> Result<Option<Verdict>, SolveError> {
        let card = self.vectors.pop_front().expect("checked non-empty");
        let system = &self.prepared.preprocessed;
        let outcome = find_model_until(system, &card, &self.budget, Some(slice))?;
        debug!(%card, outcome = outcome_name(&outcome), "model slice");
        match outcome {
            FindOutcome::Model(mut model) => {
                hook(&mut model);
                let sat = self.check_model(card, model)?;
                Ok(Some(Verdict::Sat(Box::new(sat))))
            }
            FindOutcome::NoModelAtThisSize => {
                // Totals are visited in ascending order, so a total is
                // exhausted once the next vector has a larger one.
                let total = card.total();
                if self.vectors.front().map(|c| c.total()) != Some(total) {
                    self.models_exhausted_to = total;
                }
                Ok(None)
            }
            FindOutcome::TimedOut => {
                self.vectors.push_front(card);
                self.model_slice = (self.model_slice * 2).min(self.config.timeout);
                Ok(None)
            }
        }
    }

    fn refuter_step(&mut self, slice: Instant) -> Result<Option<Verdict>, SolveError> {
        let h = self.next_height;
        let limits = ChainLimits {
            deadline: Some(slice),
            ..ChainLimits::default()
        };
        let system = &self.prepared.preprocessed;
        let outcome = bounded_refute_with(system, h, limits);
        debug!(height = h, "refuter slice");
        match outcome {
            RefuteOutcome::Refuted(d) => {
                replay_derivation(system, &d).map_err(|e| {
                    SolveError::Verification(format!("refutation at height {h} does not replay: {e}"))
                })?;
                Ok(Some(Verdict::Unsat(d)))
            }
            RefuteOutcome::NotRefutedAtThisBound => {
                self.refuter_exhausted_to = h;
                self.next_height += 1;
                self.refuter_done = self.next_height > self.config.refute_height;
                Ok(None)
            }
            RefuteOutcome::GaveUp(LimitHit::Deadline) => {
                self.refuter_slice = (self.refuter_slice * 2).min(self.config.timeout);
                Ok(None)
            }
            RefuteOutcome::GaveUp(LimitHit::Facts) => {
                // Larger heights only derive more facts.
                self.refuter_done = true;
                Ok(None)
            }
        }
    }

    /// The verdict gate: a model is reported only after the independent
    /// clause evaluator, the automaton agreement check and the Herbrand check
    /// on the original clauses all pass.
    fn check_model(&self, cardinality: CardinalityVector, model: FiniteModel) -> Result<SatResult, SolveError> {
        let system = &self.prepared.preprocessed;
        let sig = &system.signature;
        match verify_model(system, &model) {
            Ok(Verification::Ok) => {}
            Ok(Verification::CounterInstance { clause, assignment }) => {
                return Err(SolveError::Verification(format!(
                    "model at {cardinality} violates clause {clause} under {assignment:?}"
                )))
            }
            Err(e) => return Err(SolveError::Verification(format!("model at {cardinality} is malformed: {e}"))),
        }
        let automata = build_automata(&model, sig, false)?;
        let theorem1 = theorem1_check(&model, &automata, sig, self.config.theorem1_height);
        if !theorem1.is_ok() {
            return Err(SolveError::Verification(format!(
                "automata disagree with the model: {:?}",
                theorem1.outcome
            )));
        }
        let herbrand = check_herbrand_model(&self.prepared.original, &automata, self.config.check_height)?;
        if let Some(failure) = herbrand.first_failure() {
            return Err(SolveError::Verification(format!(
                "automata violate clause {} ({}) under {:?}",
                failure.index, failure.clause, failure.failure
            )));
        }
        Ok(SatResult {
            cardinality,
            model,
            automata,
            theorem1,
            herbrand,
        })
    }
}

fn outcome_name(o: &FindOutcome) -> &'static str {
    match o {
        FindOutcome::Model(_) => "model",
        FindOutcome::NoModelAtThisSize => "none",
        FindOutcome::TimedOut => "timeout",
    }
}
