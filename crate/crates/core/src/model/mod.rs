//! Finite model finding for constraint-free clause systems.
//!
//! Constructors are treated as uninterpreted functions, so a finite model of
//! the preprocessed system is an ordinary first-order model with finite
//! domains. [`find_model`] searches one cardinality vector at a time;
//! [`verify_model`] is an independent checker.

mod canonical;
mod finder;
mod finite;
pub mod sat;
mod verify;

pub use canonical::canonicalize;
pub use finder::{cardinality_schedule, find_model, find_model_until, FindOutcome, SearchBudget};
pub use finite::{
    tuples_over, CardinalityVector, FiniteModel, FunctionTable, ModelError, ModelParseError,
    PredicateTable,
};
pub use verify::{verify_model, Verification};
