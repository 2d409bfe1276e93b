//! The candidate-model language: block extraction from raw proposer output,
//! parsing, static validation, and canonical pretty-printing.
//!
//! Grammar (keywords are lowercase and literal):
//!
//! ```text
//! model := "data" "{" decl* "}" "params" "{" pdecl* "}"
//!          "model" "{" stmt* "}" "goal" "{" gdecl* "}"
//! decl  := ("int"|"real") NAME ("[" (INT|NAME) "]")? ("in" "{0,1}")? ";"
//! pdecl := "real" ("<" bound ("," bound)? ">")? NAME ("[" (INT|NAME) "]")? ";"
//! bound := ("lower"|"upper") "=" REAL
//! stmt  := NAME "~" DIST "(" expr ("," expr)* ")" ";"
//! gdecl := NAME "=" expr ";"
//! expr  := literals, names, + - * /, parentheses, element indexing
//! ```
//!
//! Blocks may be omitted (an omitted block is empty) but must appear in the
//! order above; a missing goal block is caught by validation, not the parser.

mod ast;
mod extract;
mod lexer;
mod parser;
mod printer;
mod validate;

pub use ast::{
    ArrayLen, BinOp, DataDecl, Dist, Expr, GoalDecl, NumKind, ParamDecl, ParsedModel,
    SamplingStatement,
};
pub use extract::{extract_blocks, Blocks};
pub use parser::parse_model;
pub use printer::pretty_print;
pub use validate::{validate_model, Issue, ValidationCode, ValidationReport};

use thiserror::Error;

/// Error codes surfaced by the lexer and parser.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DslErrorCode {
    /// Malformed input: unexpected token, bad arity, reserved word misuse.
    Syntax,
    /// A sampling statement names a distribution outside the supported set.
    UnknownDist,
    /// A statement or goal references a name with no declaration.
    UndeclaredName,
}

impl DslErrorCode {
    pub fn as_str(self) -> &'static str {
        match self {
            DslErrorCode::Syntax => "E_SYNTAX",
            DslErrorCode::UnknownDist => "E_UNKNOWN_DIST",
            DslErrorCode::UndeclaredName => "E_UNDECLARED_NAME",
        }
    }
}

/// A parse failure with its 1-based source position.
#[derive(Debug, Clone, Error)]
#[error("{} at {line}:{col}: {message}", code.as_str())]
pub struct DslError {
    pub code: DslErrorCode,
    pub message: String,
    pub line: u32,
    pub col: u32,
}

impl DslError {
    pub(crate) fn new(code: DslErrorCode, message: impl Into<String>, line: u32, col: u32) -> Self {
        DslError {
            code,
            message: message.into(),
            line,
            col,
        }
    }
}

/// One candidate model as produced by a proposer. Extraction runs at
/// construction, so a source always knows whether it carried a model block.
#[derive(Debug, Clone)]
pub struct ModelSource {
    /// Unique within one pipeline run.
    pub id: String,
    /// Full proposer output.
    pub raw_text: String,
    /// Text of the THOUGHTS block, when present.
    pub thoughts_text: Option<String>,
    /// Text of the MODEL block, when present.
    pub model_text: Option<String>,
}

impl ModelSource {
    pub fn new(id: impl Into<String>, raw_text: impl Into<String>) -> Self {
        let raw_text = raw_text.into();
        let blocks = extract_blocks(&raw_text);
        ModelSource {
            id: id.into(),
            raw_text,
            thoughts_text: blocks.thoughts,
            model_text: blocks.model,
        }
    }
}
