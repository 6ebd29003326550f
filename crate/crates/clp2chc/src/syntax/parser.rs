//! Recursive-descent parser producing a [`Database`].
//!
//! The accepted grammar is the Prolog subset with functions, lists, and
//! CLP(Z) constraints, extended with quoted atoms, `%` comments, `\+`,
//! `=`/`\=`/`=\=`, `is`/`=:=` (read as `#=`), and `:- goal.` directives,
//! which are recognized, discarded, and reported as warnings.
//!
//! Arithmetic follows standard Prolog precedence: comparisons bind loosest,
//! then `+`/`-`, then `*`//`/`/`mod`, then unary minus; the binary levels
//! are left-associative.

use std::collections::HashSet;

use crate::diagnostics::{Diagnostic, Span};

use super::ast::{ArithOp, BodyItem, Clause, ConstraintOp, Database, Term};
use super::lexer::{tokenize, Token, TokenKind};
use super::SyntaxError;

/// Builtins outside the supported fragment; calling them is an
/// unsupported-construct error rather than a silent mistranslation.
const REJECTED_BUILTINS: &[(&str, usize)] = &[
    ("write", 1),
    ("writeln", 1),
    ("print", 1),
    ("nl", 0),
    ("read", 1),
    ("findall", 3),
    ("bagof", 3),
    ("setof", 3),
    ("forall", 2),
    ("between", 3),
    ("assert", 1),
    ("asserta", 1),
    ("assertz", 1),
    ("retract", 1),
    ("atom", 1),
    ("number", 1),
    ("integer", 1),
    ("var", 1),
    ("nonvar", 1),
    ("is_list", 1),
    ("call", 1),
    ("true", 0),
    ("fail", 0),
    ("false", 0),
    ("halt", 0),
    ("halt", 1),
    ("op", 3),
];

/// Successful parse: the clause database plus non-fatal warnings
/// (currently only discarded directives).
#[derive(Debug, Clone)]
pub struct ParseResult {
    pub database: Database,
    pub warnings: Vec<Diagnostic>,
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    end_span: Span,
    warnings: Vec<Diagnostic>,
    /// All variable names written in the source, so fresh names for `_`
    /// can never collide with them.
    named_vars: HashSet<String>,
    anon_counter: u64,
    /// Inside a `:- goal.` directive the builtin blacklist is not applied;
    /// the whole directive is discarded anyway.
    in_directive: bool,
}

pub fn parse_program(text: &str) -> Result<ParseResult, SyntaxError> {
    let tokens = tokenize(text)?;
    let named_vars = tokens
        .iter()
        .filter_map(|t| match &t.kind {
            TokenKind::Variable(name) => Some(name.clone()),
            _ => None,
        })
        .collect();
    let end = text.len();
    let end_line = text.bytes().filter(|b| *b == b'\n').count() as u32 + 1;
    let mut parser = Parser {
        tokens,
        pos: 0,
        end_span: Span::new(end, end, end_line, 1),
        warnings: Vec::new(),
        named_vars,
        anon_counter: 0,
        in_directive: false,
    };
    let mut clauses = Vec::new();
    while !parser.at_end() {
        if let Some(clause) = parser.clause()? {
            clauses.push(clause);
        }
    }
    Ok(ParseResult {
        database: Database::new(clauses),
        warnings: parser.warnings,
    })
}

impl Parser {
    fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    fn peek(&self) -> Option<&TokenKind> {
        self.tokens.get(self.pos).map(|t| &t.kind)
    }

    fn peek_span(&self) -> Span {
        self.tokens
            .get(self.pos)
            .map(|t| t.span)
            .unwrap_or(self.end_span)
    }

    fn bump(&mut self) -> Option<Token> {
        let token = self.tokens.get(self.pos).cloned();
        if token.is_some() {
            self.pos += 1;
        }
        token
    }

    fn error(&self, expected: &[&str]) -> SyntaxError {
        let found = match self.tokens.get(self.pos) {
            Some(t) => t.kind.describe(),
            None => "end of input".to_string(),
        };
        SyntaxError::Parse {
            span: self.peek_span(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found,
        }
    }

    fn unsupported(&self, span: Span, what: impl Into<String>) -> SyntaxError {
        SyntaxError::Unsupported {
            span,
            construct: what.into(),
        }
    }

    fn expect_dot(&mut self) -> Result<Span, SyntaxError> {
        match self.peek() {
            Some(TokenKind::Dot) => Ok(self.bump().unwrap().span),
            _ => Err(self.error(&["`.`"])),
        }
    }

    fn fresh_anon(&mut self) -> String {
        loop {
            let name = format!("_G{}", self.anon_counter);
            self.anon_counter += 1;
            if !self.named_vars.contains(&name) {
                self.named_vars.insert(name.clone());
                return name;
            }
        }
    }

    /// One clause, or `None` for a discarded directive.
    fn clause(&mut self) -> Result<Option<Clause>, SyntaxError> {
        let start = self.peek_span();
        match self.peek() {
            Some(TokenKind::Op(":-")) => {
                self.bump();
                // Directive: parse the goal for well-formedness, then drop it.
                self.in_directive = true;
                let goal = self.body_items();
                self.in_directive = false;
                let _goal = goal?;
                let end = self.expect_dot()?;
                self.warnings
                    .push(Diagnostic::warning(start.join(end), "directive ignored"));
                Ok(None)
            }
            Some(TokenKind::Op("?-")) => {
                self.bump();
                let body = self.body_items()?;
                let end = self.expect_dot()?;
                let mut clause = Clause::query(body);
                clause.span = start.join(end);
                Ok(Some(clause))
            }
            _ => {
                let (name, args, head_span) = self.predicate()?;
                let body = match self.peek() {
                    Some(TokenKind::Op(":-")) => {
                        self.bump();
                        self.body_items()?
                    }
                    _ => Vec::new(),
                };
                let end = self.expect_dot()?;
                if body.is_empty() {
                    self.check_builtin(&name, args.len(), head_span)?;
                    let mut clause = Clause::fact(name, args);
                    clause.span = start.join(end);
                    Ok(Some(clause))
                } else {
                    self.check_builtin(&name, args.len(), head_span)?;
                    let mut clause = Clause::rule(name, args, body);
                    clause.span = start.join(end);
                    Ok(Some(clause))
                }
            }
        }
    }

    fn check_builtin(&self, name: &str, arity: usize, span: Span) -> Result<(), SyntaxError> {
        if !self.in_directive && REJECTED_BUILTINS.contains(&(name, arity)) {
            return Err(self.unsupported(span, format!("builtin predicate {name}/{arity}")));
        }
        Ok(())
    }

    /// `atom` or `atom(term, ...)`.
    fn predicate(&mut self) -> Result<(String, Vec<Term>, Span), SyntaxError> {
        match self.peek() {
            Some(TokenKind::Atom(_)) => {
                let token = self.bump().unwrap();
                let TokenKind::Atom(name) = token.kind else {
                    unreachable!()
                };
                let mut span = token.span;
                let args = if matches!(self.peek(), Some(TokenKind::LParen)) {
                    self.bump();
                    let args = self.term_list()?;
                    match self.peek() {
                        Some(TokenKind::RParen) => {
                            span = span.join(self.bump().unwrap().span);
                        }
                        _ => return Err(self.error(&["`,`", "`)`"])),
                    }
                    args
                } else {
                    Vec::new()
                };
                Ok((name, args, span))
            }
            Some(TokenKind::Op("!")) => Err(self.unsupported(self.peek_span(), "cut `!`")),
            _ => Err(self.error(&["atom"])),
        }
    }

    fn body_items(&mut self) -> Result<Vec<BodyItem>, SyntaxError> {
        let mut items = vec![self.body_item()?];
        while matches!(self.peek(), Some(TokenKind::Comma)) {
            self.bump();
            items.push(self.body_item()?);
        }
        Ok(items)
    }

    fn body_item(&mut self) -> Result<BodyItem, SyntaxError> {
        match self.peek() {
            Some(TokenKind::Op("\\+")) => {
                self.bump();
                let inner = self.body_item_simple()?;
                Ok(BodyItem::Negation(Box::new(inner)))
            }
            _ => self.body_item_simple(),
        }
    }

    /// A body item without a leading `\+`.
    fn body_item_simple(&mut self) -> Result<BodyItem, SyntaxError> {
        if let Some(TokenKind::Op("!")) = self.peek() {
            return Err(self.unsupported(self.peek_span(), "cut `!`"));
        }
        let start = self.peek_span();
        let lhs = self.arith_expr()?;
        let op = match self.peek() {
            Some(TokenKind::Op(op)) => match *op {
                "=" => Some(BodyOp::Unify),
                "\\=" | "=\\=" => Some(BodyOp::Diseq),
                "#=" | "=:=" => Some(BodyOp::Constraint(ConstraintOp::Eq)),
                "#\\=" => Some(BodyOp::Constraint(ConstraintOp::Ne)),
                "#<" => Some(BodyOp::Constraint(ConstraintOp::Lt)),
                "#=<" => Some(BodyOp::Constraint(ConstraintOp::Le)),
                "#>" => Some(BodyOp::Constraint(ConstraintOp::Gt)),
                "#>=" => Some(BodyOp::Constraint(ConstraintOp::Ge)),
                "<" | ">" | "=<" | ">=" => {
                    return Err(self.unsupported(
                        self.peek_span(),
                        format!("operator `{op}` (use `#{op}` for CLP(Z) comparison)"),
                    ))
                }
                _ => None,
            },
            Some(TokenKind::Atom(name)) if name == "is" => {
                Some(BodyOp::Constraint(ConstraintOp::Eq))
            }
            _ => None,
        };
        match op {
            Some(op) => {
                self.bump();
                let rhs = self.arith_expr()?;
                Ok(match op {
                    BodyOp::Unify => BodyItem::Unify(lhs, rhs),
                    BodyOp::Diseq => BodyItem::TermDiseq(lhs, rhs),
                    BodyOp::Constraint(c) => BodyItem::ArithConstraint(c, lhs, rhs),
                })
            }
            None => match lhs {
                Term::Atom(name) => {
                    self.check_builtin(&name, 0, start)?;
                    Ok(BodyItem::Call(name, Vec::new()))
                }
                Term::Compound(name, args) => {
                    self.check_builtin(&name, args.len(), start)?;
                    Ok(BodyItem::Call(name, args))
                }
                _ => Err(self.error(&[
                    "predicate call",
                    "`=`",
                    "`\\=`",
                    "`=\\=`",
                    "constraint operator",
                ])),
            },
        }
    }

    fn term_list(&mut self) -> Result<Vec<Term>, SyntaxError> {
        let mut terms = vec![self.arith_expr()?];
        while matches!(self.peek(), Some(TokenKind::Comma)) {
            self.bump();
            terms.push(self.arith_expr()?);
        }
        Ok(terms)
    }

    /// Additive level: `mul (('+'|'-') mul)*`, left-associative.
    fn arith_expr(&mut self) -> Result<Term, SyntaxError> {
        let mut lhs = self.arith_mul()?;
        loop {
            let op = match self.peek() {
                Some(TokenKind::Op("+")) => ArithOp::Add,
                Some(TokenKind::Op("-")) => ArithOp::Sub,
                _ => break,
            };
            self.bump();
            let rhs = self.arith_mul()?;
            lhs = Term::ArithExpr(op, vec![lhs, rhs]);
        }
        Ok(lhs)
    }

    /// Multiplicative level: `unary (('*'|'/'|mod) unary)*`, left-associative.
    fn arith_mul(&mut self) -> Result<Term, SyntaxError> {
        let mut lhs = self.arith_unary()?;
        loop {
            let op = match self.peek() {
                Some(TokenKind::Op("*")) => ArithOp::Mul,
                Some(TokenKind::Op("/")) => ArithOp::Div,
                Some(TokenKind::Atom(name)) if name == "mod" => ArithOp::Mod,
                _ => break,
            };
            self.bump();
            let rhs = self.arith_unary()?;
            lhs = Term::ArithExpr(op, vec![lhs, rhs]);
        }
        Ok(lhs)
    }

    fn arith_unary(&mut self) -> Result<Term, SyntaxError> {
        if let Some(TokenKind::Op("-")) = self.peek() {
            self.bump();
            let operand = self.arith_unary()?;
            return Ok(Term::ArithExpr(ArithOp::Neg, vec![operand]));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Term, SyntaxError> {
        match self.peek() {
            Some(TokenKind::Integer(_)) => {
                let token = self.bump().unwrap();
                let TokenKind::Integer(value) = token.kind else {
                    unreachable!()
                };
                Ok(Term::IntLit(value))
            }
            Some(TokenKind::Variable(_)) => {
                let token = self.bump().unwrap();
                let TokenKind::Variable(name) = token.kind else {
                    unreachable!()
                };
                Ok(Term::Var(name))
            }
            Some(TokenKind::Anonymous) => {
                self.bump();
                Ok(Term::Var(self.fresh_anon()))
            }
            Some(TokenKind::Atom(_)) => {
                let token = self.bump().unwrap();
                let TokenKind::Atom(name) = token.kind else {
                    unreachable!()
                };
                if matches!(self.peek(), Some(TokenKind::LParen)) {
                    self.bump();
                    let args = self.term_list()?;
                    match self.peek() {
                        Some(TokenKind::RParen) => {
                            self.bump();
                            Ok(Term::Compound(name, args))
                        }
                        _ => Err(self.error(&["`,`", "`)`"])),
                    }
                } else {
                    Ok(Term::Atom(name))
                }
            }
            Some(TokenKind::LBracket) => self.list(),
            Some(TokenKind::LParen) => {
                self.bump();
                let inner = self.arith_expr()?;
                match self.peek() {
                    Some(TokenKind::RParen) => {
                        self.bump();
                        Ok(inner)
                    }
                    _ => Err(self.error(&["`)`"])),
                }
            }
            Some(TokenKind::Op("!")) => Err(self.unsupported(self.peek_span(), "cut `!`")),
            _ => Err(self.error(&["term"])),
        }
    }

    fn list(&mut self) -> Result<Term, SyntaxError> {
        self.bump(); // `[`
        if matches!(self.peek(), Some(TokenKind::RBracket)) {
            self.bump();
            return Ok(Term::nil());
        }
        let elements = self.term_list()?;
        match self.peek() {
            Some(TokenKind::RBracket) => {
                self.bump();
                Ok(Term::ListTerm(elements, None))
            }
            Some(TokenKind::Pipe) => {
                self.bump();
                let tail = self.arith_expr()?;
                match self.peek() {
                    Some(TokenKind::RBracket) => {
                        self.bump();
                        Ok(Term::ListTerm(elements, Some(Box::new(tail))))
                    }
                    _ => Err(self.error(&["`]`"])),
                }
            }
            _ => Err(self.error(&["`,`", "`|`", "`]`"])),
        }
    }
}

enum BodyOp {
    Unify,
    Diseq,
    Constraint(ConstraintOp),
}
