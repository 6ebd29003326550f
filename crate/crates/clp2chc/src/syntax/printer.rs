//! Pretty-printer from the AST back to Prolog source.
//!
//! The output re-parses to a structurally identical database: atoms that
//! are not plain lowercase names are quoted, and arithmetic is
//! parenthesized exactly where precedence requires it.

use std::fmt::Write;

use super::ast::{ArithOp, BodyItem, Clause, ClauseKind, Database, Term};

pub fn print_program(db: &Database) -> String {
    let mut out = String::new();
    for clause in &db.clauses {
        print_clause(&mut out, clause);
        out.push('\n');
    }
    out
}

pub fn print_clause(out: &mut String, clause: &Clause) {
    match clause.kind() {
        ClauseKind::Fact => {
            let head = clause.head.as_ref().unwrap();
            print_predicate(out, &head.name, &head.args);
        }
        ClauseKind::Rule => {
            let head = clause.head.as_ref().unwrap();
            print_predicate(out, &head.name, &head.args);
            out.push_str(" :- ");
            print_body(out, &clause.body);
        }
        ClauseKind::Query => {
            out.push_str("?- ");
            print_body(out, &clause.body);
        }
    }
    out.push('.');
}

fn print_body(out: &mut String, body: &[BodyItem]) {
    for (i, item) in body.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        print_body_item(out, item);
    }
}

fn print_body_item(out: &mut String, item: &BodyItem) {
    match item {
        BodyItem::Call(name, args) => print_predicate(out, name, args),
        BodyItem::Unify(lhs, rhs) => print_infix(out, lhs, "=", rhs),
        BodyItem::TermDiseq(lhs, rhs) => print_infix(out, lhs, "=\\=", rhs),
        BodyItem::ArithConstraint(op, lhs, rhs) => print_infix(out, lhs, op.symbol(), rhs),
        BodyItem::Negation(inner) => {
            out.push_str("\\+ ");
            print_body_item(out, inner);
        }
    }
}

fn print_infix(out: &mut String, lhs: &Term, op: &str, rhs: &Term) {
    print_term(out, lhs);
    let _ = write!(out, " {op} ");
    print_term(out, rhs);
}

fn print_predicate(out: &mut String, name: &str, args: &[Term]) {
    print_atom_name(out, name);
    if !args.is_empty() {
        out.push('(');
        for (i, arg) in args.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            print_term(out, arg);
        }
        out.push(')');
    }
}

pub fn print_term(out: &mut String, term: &Term) {
    print_term_prec(out, term, 0)
}

// Binding strength for parenthesization: additive 1, multiplicative 2,
// unary minus 3. A child is wrapped when its level is below the context.
fn arith_level(op: ArithOp) -> u8 {
    match op {
        ArithOp::Add | ArithOp::Sub => 1,
        ArithOp::Mul | ArithOp::Div | ArithOp::Mod => 2,
        ArithOp::Neg => 3,
    }
}

fn print_term_prec(out: &mut String, term: &Term, min_level: u8) {
    match term {
        Term::Var(name) => out.push_str(name),
        Term::Atom(name) => print_atom_name(out, name),
        Term::IntLit(value) => {
            let _ = write!(out, "{value}");
        }
        Term::Compound(name, args) => print_predicate(out, name, args),
        Term::ListTerm(elements, tail) => {
            out.push('[');
            for (i, element) in elements.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                print_term(out, element);
            }
            if let Some(tail) = tail {
                out.push_str(" | ");
                print_term(out, tail);
            }
            out.push(']');
        }
        Term::ArithExpr(op, operands) => {
            let level = arith_level(*op);
            let needs_parens = level < min_level;
            if needs_parens {
                out.push('(');
            }
            if *op == ArithOp::Neg {
                out.push('-');
                // The operand must re-parse as a unary operand, so anything
                // looser than unary level gets parenthesized.
                print_term_prec(out, &operands[0], 3);
            } else {
                // Left child may be at the same level (left-associativity),
                // right child must bind strictly tighter.
                print_term_prec(out, &operands[0], level);
                let _ = write!(out, " {} ", op.symbol());
                print_term_prec(out, &operands[1], level + 1);
            }
            if needs_parens {
                out.push(')');
            }
        }
    }
}

fn print_atom_name(out: &mut String, name: &str) {
    if is_plain_atom(name) {
        out.push_str(name);
    } else {
        out.push('\'');
        for ch in name.chars() {
            match ch {
                '\'' => out.push_str("\\'"),
                '\\' => out.push_str("\\\\"),
                '\n' => out.push_str("\\n"),
                '\t' => out.push_str("\\t"),
                _ => out.push(ch),
            }
        }
        out.push('\'');
    }
}

/// True when the name lexes back as a bare atom token.
fn is_plain_atom(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => {}
        _ => return false,
    }
    // `is` and `mod` lex as atoms but read as operators in term context.
    if name == "is" || name == "mod" {
        return false;
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_program;

    fn roundtrip(text: &str) -> Database {
        let db = parse_program(text).unwrap().database;
        let printed = print_program(&db);
        let reparsed = parse_program(&printed)
            .unwrap_or_else(|e| panic!("printed program failed to parse: {e}\n{printed}"))
            .database;
        assert_eq!(db, reparsed, "round-trip mismatch for:\n{printed}");
        db
    }

    #[test]
    fn simple_fact() {
        let db = parse_program("man(tom).").unwrap().database;
        assert_eq!(print_program(&db), "man(tom).\n");
    }

    #[test]
    fn query_prints_back() {
        let db = parse_program("?- path(tehran, munich, D, X), D #< 40.")
            .unwrap()
            .database;
        assert_eq!(
            print_program(&db),
            "?- path(tehran, munich, D, X), D #< 40.\n"
        );
    }

    #[test]
    fn empty_list_prints_as_brackets() {
        let mut out = String::new();
        print_term(&mut out, &Term::nil());
        assert_eq!(out, "[]");
    }

    #[test]
    fn roundtrips() {
        roundtrip("man(tom).");
        roundtrip(":- use_module(library(clpz)).\npath(A, A, 0, [waypoint(A, 0)]).");
        roundtrip("list_concat([X1|L1],L2,[X1|L3]) :- list_concat(L1,L2,L3).");
        roundtrip("p(X) :- X #= 1 + 2 * 3 - 4, \\+ X = a, X =\\= b.");
        roundtrip("p(X) :- X #= (1 + 2) * 3.");
        roundtrip("p(X) :- X #= -(1 + 2), X #> - - 3.");
        roundtrip("p('Hello World', 'it''s', []).");
        roundtrip("p(_, _, [a, b | T]) :- q(T).");
        roundtrip("p :- q.");
        roundtrip("?- p([a|[b]]).");
        roundtrip("p('is', 'mod').");
    }

    #[test]
    fn quoted_operator_like_atoms_stay_quoted() {
        let db = parse_program("p('is').").unwrap().database;
        assert_eq!(print_program(&db), "p('is').\n");
    }
}
