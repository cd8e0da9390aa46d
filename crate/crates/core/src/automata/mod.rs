//! Deterministic bottom-up tree automata read off a finite model.
//!
//! Every constructor table of the model becomes a set of transitions shared by
//! all automata; the automaton of predicate `P` accepts a tuple of terms when
//! the states the terms reach form a tuple in the model's table for `P`.

mod automaton;
mod check;
mod text;

pub use automaton::{build_automata, AutomataError, TransitionTable, TreeAutomaton};
pub use check::{
    check_herbrand_model, theorem1_check, ClauseCheck, HerbrandCheckReport, Theorem1Outcome,
    HERBRAND_INSTANCE_CAP,
    Theorem1Report, THEOREM1_TUPLE_CAP,
};
pub use text::{parse_automaton, serialize_automaton, AutomatonParseError};

#[cfg(test)]
mod tests;
