//! Reading input scripts into clause systems.

mod clausify;
mod emit;
mod error;
mod script;
mod sexpr;
mod skolem;

pub use clausify::clausify;
pub use emit::{clause_to_sexpr, emit_script, formula_to_sexpr, term_to_sexpr};
pub use error::{ClausifyError, FrontendError, ParseError, ParseErrorKind};
pub use script::{parse_script, Command, ConstructorDecl, DatatypeDecl, Field, Script};
pub use sexpr::{parse_sexprs, Pos, SExpr};
pub use skolem::{skolemize_existentials, SkolemFunction, SkolemRecord};

/// Parses, clausifies and Skolemizes a script.
pub fn load_system(
    text: &str,
) -> Result<(crate::ir::ChcSystem, SkolemRecord), FrontendError> {
    let script = parse_script(text)?;
    let system = clausify(&script)?;
    let out = skolemize_existentials(&system).map_err(ClausifyError::from)?;
    Ok(out)
}
