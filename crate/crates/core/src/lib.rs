//! Regular invariant inference for constrained Horn clauses over algebraic
//! data types.
//!
//! The pipeline reads a script ([`frontend`]), rewrites it into a
//! constraint-free clause system ([`preprocess`]), looks for a finite model
//! ([`model`]) and turns it into tree automata ([`automata`]). Unsatisfiable
//! systems are refuted by bounded forward chaining ([`refuter`]).

pub mod automata;
pub mod fixtures;
pub mod frontend;
pub mod fuzz;
pub mod ir;
pub mod model;
pub mod preprocess;
pub mod refuter;
