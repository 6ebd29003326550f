//! Lexing, parsing, and printing of the Prolog/CLP(Z) subset.

pub mod ast;
pub mod lexer;
pub mod parser;
pub mod printer;

pub use ast::{ArithOp, BodyItem, Clause, ClauseKind, ConstraintOp, Database, Head, Term};
pub use lexer::{tokenize, Token, TokenKind};
pub use parser::{parse_program, ParseResult};
pub use printer::{print_program, print_term};

use crate::diagnostics::Span;

/// Errors from tokenizing or parsing Prolog source.
#[derive(Debug, Clone, thiserror::Error)]
pub enum SyntaxError {
    #[error("{span}: lexical error: {message}")]
    Lexical { span: Span, message: String },
    #[error("{span}: parse error: expected {}, found {found}", expected.join(" or "))]
    Parse {
        span: Span,
        expected: Vec<String>,
        found: String,
    },
    #[error("{span}: unsupported construct: {construct}")]
    Unsupported { span: Span, construct: String },
}

impl SyntaxError {
    pub fn span(&self) -> Span {
        match self {
            SyntaxError::Lexical { span, .. }
            | SyntaxError::Parse { span, .. }
            | SyntaxError::Unsupported { span, .. } => *span,
        }
    }
}
