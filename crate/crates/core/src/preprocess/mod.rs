//! Rewrites a clause system into an equality-free, constraint-free system
//! over uninterpreted functions.

mod diseq;
mod dnf;
mod nnf;
mod pipeline;
mod report;
mod selectors;
mod unify;

pub use diseq::{add_diseq_rules, diseq_rule_system, diseq_sorts, encode_disequalities};
pub use dnf::{dnf, split_dnf};
pub use nnf::{nnf, to_nnf};
pub use pipeline::run_pipeline;
pub use report::{PassReport, PassStats, PreprocessError};
pub use selectors::eliminate_testers_selectors;
pub use unify::{eliminate_equalities, unify, UnifyFailure};
