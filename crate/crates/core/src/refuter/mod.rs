//! Bounded refutation by forward chaining over ground constructor terms.
//!
//! Saturating the definite clauses with every variable ranging over terms of
//! height at most `h` yields an under-approximation of the least Herbrand
//! model; a query whose body is covered by it proves the system
//! unsatisfiable, and the chain of ground instances is returned as a
//! replayable derivation.

mod chain;
mod derivation;

pub use chain::{
    bounded_refute, bounded_refute_with, least_model_facts, least_model_facts_with, ChainLimits,
    FactBase, Justification, LimitHit, RefuteOutcome,
};
pub use derivation::{replay_derivation, Derivation, ReplayError, Step};
