//! Tokenizer for the Prolog/CLP(Z) subset.
//!
//! `%` comments and whitespace are skipped. Every token carries its span.

use std::fmt;

use num_bigint::BigInt;

use crate::diagnostics::Span;

use super::SyntaxError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    /// Unquoted lowercase name, or quoted atom (quotes stripped).
    Atom(String),
    /// Name starting with an uppercase letter or `_` (but not `_` alone).
    Variable(String),
    /// A single `_`.
    Anonymous,
    /// Non-negative decimal literal.
    Integer(BigInt),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Pipe,
    /// Clause-terminating `.`
    Dot,
    /// An operator or reserved symbol such as `:-`, `#=`, `+`, `!`.
    Op(&'static str),
}

impl TokenKind {
    pub fn describe(&self) -> String {
        match self {
            TokenKind::Atom(name) => format!("atom `{name}`"),
            TokenKind::Variable(name) => format!("variable `{name}`"),
            TokenKind::Anonymous => "`_`".to_string(),
            TokenKind::Integer(value) => format!("integer `{value}`"),
            TokenKind::LParen => "`(`".to_string(),
            TokenKind::RParen => "`)`".to_string(),
            TokenKind::LBracket => "`[`".to_string(),
            TokenKind::RBracket => "`]`".to_string(),
            TokenKind::Comma => "`,`".to_string(),
            TokenKind::Pipe => "`|`".to_string(),
            TokenKind::Dot => "`.`".to_string(),
            TokenKind::Op(op) => format!("`{op}`"),
        }
    }
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Span,
}

/// Multi-character operators, longest first so greedy matching is correct.
const OPERATORS: &[&str] = &[
    "=\\=", "=:=", "#>=", "#=<", "#\\=", ":-", "?-", "\\+", "\\=", "#=", "#<", "#>", ">=", "=<",
    "=", "<", ">", "+", "-", "*", "/", "!",
];

struct Lexer<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    line: u32,
    column: u32,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src,
            bytes: src.as_bytes(),
            pos: 0,
            line: 1,
            column: 1,
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let ch = self.src[self.pos..].chars().next()?;
        self.pos += ch.len_utf8();
        if ch == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(ch)
    }

    fn here(&self) -> (usize, u32, u32) {
        (self.pos, self.line, self.column)
    }

    fn span_from(&self, start: (usize, u32, u32)) -> Span {
        Span::new(start.0, self.pos, start.1, start.2)
    }

    fn skip_trivia(&mut self) {
        loop {
            match self.peek() {
                Some(b) if (b as char).is_ascii_whitespace() => {
                    self.bump();
                }
                Some(b'%') => {
                    while let Some(b) = self.peek() {
                        if b == b'\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                _ => break,
            }
        }
    }

    fn take_while(&mut self, pred: impl Fn(u8) -> bool) -> &'a str {
        let start = self.pos;
        while let Some(b) = self.peek() {
            if pred(b) {
                self.bump();
            } else {
                break;
            }
        }
        &self.src[start..self.pos]
    }

    fn quoted_atom(&mut self, start: (usize, u32, u32)) -> Result<TokenKind, SyntaxError> {
        // Opening quote already consumed.
        let mut name = String::new();
        loop {
            match self.bump() {
                None => {
                    return Err(SyntaxError::Lexical {
                        span: self.span_from(start),
                        message: "unterminated quoted atom".to_string(),
                    })
                }
                Some('\'') => {
                    // `''` is an escaped quote inside the atom.
                    if self.peek() == Some(b'\'') {
                        self.bump();
                        name.push('\'');
                    } else {
                        return Ok(TokenKind::Atom(name));
                    }
                }
                Some('\\') => match self.bump() {
                    Some('n') => name.push('\n'),
                    Some('t') => name.push('\t'),
                    Some('\\') => name.push('\\'),
                    Some('\'') => name.push('\''),
                    other => {
                        return Err(SyntaxError::Lexical {
                            span: self.span_from(start),
                            message: match other {
                                Some(c) => format!("unsupported escape `\\{c}` in quoted atom"),
                                None => "unterminated quoted atom".to_string(),
                            },
                        })
                    }
                },
                Some('\n') => {
                    return Err(SyntaxError::Lexical {
                        span: self.span_from(start),
                        message: "unterminated quoted atom".to_string(),
                    })
                }
                Some(c) => name.push(c),
            }
        }
    }

    fn next_token(&mut self) -> Result<Option<Token>, SyntaxError> {
        self.skip_trivia();
        let start = self.here();
        let Some(b) = self.peek() else {
            return Ok(None);
        };
        let kind = match b {
            b'(' => {
                self.bump();
                TokenKind::LParen
            }
            b')' => {
                self.bump();
                TokenKind::RParen
            }
            b'[' => {
                self.bump();
                TokenKind::LBracket
            }
            b']' => {
                self.bump();
                TokenKind::RBracket
            }
            b',' => {
                self.bump();
                TokenKind::Comma
            }
            b'|' => {
                self.bump();
                TokenKind::Pipe
            }
            b'.' => {
                self.bump();
                TokenKind::Dot
            }
            b'\'' => {
                self.bump();
                self.quoted_atom(start)?
            }
            b'0'..=b'9' => {
                let digits = self.take_while(|b| b.is_ascii_digit());
                TokenKind::Integer(digits.parse::<BigInt>().expect("decimal digits"))
            }
            b'a'..=b'z' => {
                let name = self.take_while(|b| b.is_ascii_alphanumeric() || b == b'_');
                TokenKind::Atom(name.to_string())
            }
            b'A'..=b'Z' | b'_' => {
                let name = self.take_while(|b| b.is_ascii_alphanumeric() || b == b'_');
                if name == "_" {
                    TokenKind::Anonymous
                } else {
                    TokenKind::Variable(name.to_string())
                }
            }
            _ => {
                let rest = &self.src[self.pos..];
                match OPERATORS.iter().find(|op| rest.starts_with(**op)) {
                    Some(op) => {
                        for _ in 0..op.chars().count() {
                            self.bump();
                        }
                        TokenKind::Op(op)
                    }
                    None => {
                        let ch = self.bump().expect("peeked byte");
                        return Err(SyntaxError::Lexical {
                            span: self.span_from(start),
                            message: format!("illegal character `{ch}`"),
                        });
                    }
                }
            }
        };
        Ok(Some(Token {
            kind,
            span: self.span_from(start),
        }))
    }
}

/// Tokenize UTF-8 source into a token sequence.
pub fn tokenize(text: &str) -> Result<Vec<Token>, SyntaxError> {
    let mut lexer = Lexer::new(text);
    let mut tokens = Vec::new();
    while let Some(token) = lexer.next_token()? {
        tokens.push(token);
    }
    Ok(tokens)
}
