use thiserror::Error;

use super::sexpr::Pos;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("lexical error: {0}")]
    Lexical(String),
    #[error("`{symbol}` expects {expected} arguments, got {got}")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        got: usize,
    },
    #[error("unknown command `{0}`")]
    UnknownCommand(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("duplicate symbol `{0}`")]
    DuplicateSymbol(String),
    #[error("no check-sat")]
    NoCheckSat,
    #[error("more than one check-sat")]
    MultipleCheckSat,
    #[error("malformed {0}")]
    Malformed(String),
}

/// A parse failure with the location and text of the offending token.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{pos}: {kind} (near `{token}`)")]
pub struct ParseError {
    pub pos: Pos,
    pub token: String,
    pub kind: ParseErrorKind,
}

impl ParseError {
    pub fn new(pos: Pos, token: String, kind: ParseErrorKind) -> Self {
        ParseError { pos, token, kind }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClausifyError {
    #[error("{pos}: unsupported: {message} (near `{token}`)")]
    Unsupported {
        pos: Pos,
        token: String,
        message: String,
    },
    #[error("{pos}: {message} (near `{token}`)")]
    Invalid {
        pos: Pos,
        token: String,
        message: String,
    },
    #[error("ill-sorted clause {clause}: {message}")]
    IllSorted { clause: usize, message: String },
    #[error(transparent)]
    Signature(#[from] crate::ir::SignatureError),
}

/// Any failure turning input text into a clause system.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrontendError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Clausify(#[from] ClausifyError),
}
