//! Sorted term and clause representation shared by every pass.

mod clause;
mod enumerate;
mod signature;
mod term;
mod wellsorted;

pub use clause::{ChcSystem, Clause, Head};
pub use enumerate::{
    count_ground_terms, enumerate_ground_terms, term_height, EnumerateError, GroundTerms,
};
pub use signature::{
    FunctionDecl, FunctionKind, PredicateDecl, PredicateOrigin, SelectorDecl, Signature,
    SignatureError,
};
pub use term::{Atom, Formula, Literal, Substitution, Term, Var};
pub use wellsorted::{check_well_sorted, Diagnostic};
