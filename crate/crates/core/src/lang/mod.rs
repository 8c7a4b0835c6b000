//! The module language: a small CommonJS-style subset with `require`,
//! `eval`, closures, objects and property access.

mod ast;
mod lexer;
mod parser;
mod pretty;

use thiserror::Error;

pub use ast::*;
pub use lexer::{tokenize, Tok, Token};
pub use parser::{parse, parse_eval};
pub use pretty::{expr_to_string, pretty_print};
pub(crate) use pretty::quote;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{pos}: illegal character {found:?}")]
pub struct LexError {
    pub pos: Pos,
    pub found: char,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{pos}: expected {}, found {found}", expected.join(" or "))]
pub struct ParseError {
    pub pos: Pos,
    pub expected: Vec<String>,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LangError {
    #[error(transparent)]
    Lex(#[from] LexError),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

impl LangError {
    pub fn pos(&self) -> Pos {
        match self {
            LangError::Lex(e) => e.pos,
            LangError::Parse(e) => e.pos,
        }
    }
}
