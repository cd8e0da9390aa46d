//! Orchestration behind the `horncat` binary: load a script, preprocess it,
//! race the model finder against the bounded refuter, check the result with
//! independent oracles and render a verdict.

mod check;
mod config;
mod corpus;
mod render;
mod solve;

pub use check::{check_model_text, ModelCheck};
pub use config::RunConfig;
pub use corpus::{run_corpus, CorpusEntry, CorpusSummary};
pub use render::{render_verdict, Rendered};
pub use solve::{
    load_and_preprocess, solve, solve_system, solve_with_model_hook, Prepared, SatResult, SolveError,
    SolveOutput, UnknownInfo, Verdict,
};
