//! Abstract syntax for the supported Prolog/CLP(Z) subset.
//!
//! Terms are plain trees without source annotations; spans live on clauses.
//! Equality on clauses is structural and ignores spans, so a parsed program
//! compares equal to the re-parse of its pretty-printed form.

use num_bigint::BigInt;

use crate::diagnostics::Span;

/// Arithmetic operators usable inside CLP(Z) expressions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    /// Unary minus; exactly one operand.
    Neg,
}

impl ArithOp {
    pub fn symbol(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
            ArithOp::Mul => "*",
            ArithOp::Div => "/",
            ArithOp::Mod => "mod",
            ArithOp::Neg => "-",
        }
    }
}

/// Comparison operators of CLP(Z) constraints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConstraintOp {
    /// `#=` (also produced for `is` and `=:=`).
    Eq,
    /// `#\=`
    Ne,
    /// `#<`
    Lt,
    /// `#=<`
    Le,
    /// `#>`
    Gt,
    /// `#>=`
    Ge,
}

impl ConstraintOp {
    pub fn symbol(self) -> &'static str {
        match self {
            ConstraintOp::Eq => "#=",
            ConstraintOp::Ne => "#\\=",
            ConstraintOp::Lt => "#<",
            ConstraintOp::Le => "#=<",
            ConstraintOp::Gt => "#>",
            ConstraintOp::Ge => "#>=",
        }
    }
}

/// A Prolog term.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    /// Variable; name starts with an uppercase letter or `_`.
    Var(String),
    /// Zero-arity symbol.
    Atom(String),
    /// Function application with at least one argument.
    Compound(String, Vec<Term>),
    /// `[e1, ..., en]` or `[e1, ..., en | tail]`; a present tail implies
    /// at least one element.
    ListTerm(Vec<Term>, Option<Box<Term>>),
    /// Non-negative decimal literal. Negative numbers are parsed as unary
    /// minus applied to a literal.
    IntLit(BigInt),
    /// Arithmetic expression; two operands, except `Neg` which takes one.
    ArithExpr(ArithOp, Vec<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn atom(name: impl Into<String>) -> Term {
        Term::Atom(name.into())
    }

    pub fn compound(name: impl Into<String>, args: Vec<Term>) -> Term {
        debug_assert!(!args.is_empty(), "compound arity must be >= 1");
        Term::Compound(name.into(), args)
    }

    pub fn int(value: impl Into<BigInt>) -> Term {
        Term::IntLit(value.into())
    }

    pub fn list(elements: Vec<Term>) -> Term {
        Term::ListTerm(elements, None)
    }

    pub fn list_with_tail(elements: Vec<Term>, tail: Term) -> Term {
        debug_assert!(!elements.is_empty(), "partial list needs >= 1 element");
        Term::ListTerm(elements, Some(Box::new(tail)))
    }

    pub fn nil() -> Term {
        Term::ListTerm(Vec::new(), None)
    }

    /// True when no variable occurs anywhere in the term.
    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Atom(_) | Term::IntLit(_) => true,
            Term::Compound(_, args) | Term::ArithExpr(_, args) => args.iter().all(Term::is_ground),
            Term::ListTerm(elements, tail) => {
                elements.iter().all(Term::is_ground) && tail.as_deref().is_none_or(Term::is_ground)
            }
        }
    }

    /// Visit every variable name, in left-to-right occurrence order.
    pub fn visit_vars<'a>(&'a self, f: &mut impl FnMut(&'a str)) {
        match self {
            Term::Var(name) => f(name),
            Term::Atom(_) | Term::IntLit(_) => {}
            Term::Compound(_, args) | Term::ArithExpr(_, args) => {
                for arg in args {
                    arg.visit_vars(f);
                }
            }
            Term::ListTerm(elements, tail) => {
                for element in elements {
                    element.visit_vars(f);
                }
                if let Some(tail) = tail {
                    tail.visit_vars(f);
                }
            }
        }
    }

    /// True when `name` occurs as a variable inside the term.
    pub fn mentions_var(&self, name: &str) -> bool {
        let mut found = false;
        self.visit_vars(&mut |v| found |= v == name);
        found
    }
}

/// One goal of a clause body.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BodyItem {
    /// User predicate application; `args` may be empty.
    Call(String, Vec<Term>),
    /// `s = t`, syntactic equality by unification.
    Unify(Term, Term),
    /// `s =\= t` or `s \= t`, syntactic disequality.
    TermDiseq(Term, Term),
    /// `\+ item`; accepted by the translator only over constraints.
    Negation(Box<BodyItem>),
    /// CLP(Z) comparison such as `X #< 40`.
    ArithConstraint(ConstraintOp, Term, Term),
}

impl BodyItem {
    pub fn visit_vars<'a>(&'a self, f: &mut impl FnMut(&'a str)) {
        match self {
            BodyItem::Call(_, args) => {
                for arg in args {
                    arg.visit_vars(f);
                }
            }
            BodyItem::Unify(lhs, rhs)
            | BodyItem::TermDiseq(lhs, rhs)
            | BodyItem::ArithConstraint(_, lhs, rhs) => {
                lhs.visit_vars(f);
                rhs.visit_vars(f);
            }
            BodyItem::Negation(inner) => inner.visit_vars(f),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClauseKind {
    Fact,
    Rule,
    Query,
}

/// Clause head: predicate name plus argument terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Head {
    pub name: String,
    pub args: Vec<Term>,
}

/// A fact, rule, or query. Facts have a head and empty body, rules have
/// both, queries have no head and a nonempty body.
#[derive(Debug, Clone)]
pub struct Clause {
    pub head: Option<Head>,
    pub body: Vec<BodyItem>,
    pub span: Span,
}

impl Clause {
    pub fn fact(name: impl Into<String>, args: Vec<Term>) -> Clause {
        Clause {
            head: Some(Head {
                name: name.into(),
                args,
            }),
            body: Vec::new(),
            span: Span::dummy(),
        }
    }

    pub fn rule(name: impl Into<String>, args: Vec<Term>, body: Vec<BodyItem>) -> Clause {
        debug_assert!(!body.is_empty(), "rule body must be nonempty");
        Clause {
            head: Some(Head {
                name: name.into(),
                args,
            }),
            body,
            span: Span::dummy(),
        }
    }

    pub fn query(body: Vec<BodyItem>) -> Clause {
        debug_assert!(!body.is_empty(), "query body must be nonempty");
        Clause {
            head: None,
            body,
            span: Span::dummy(),
        }
    }

    pub fn kind(&self) -> ClauseKind {
        match (&self.head, self.body.is_empty()) {
            (Some(_), true) => ClauseKind::Fact,
            (Some(_), false) => ClauseKind::Rule,
            (None, _) => ClauseKind::Query,
        }
    }

    /// Variable names of the clause in first-occurrence order, head first.
    pub fn variables(&self) -> Vec<&str> {
        let mut ordered: Vec<&str> = Vec::new();
        let mut push = |name| {
            if !ordered.contains(&name) {
                ordered.push(name);
            }
        };
        if let Some(head) = &self.head {
            for arg in &head.args {
                arg.visit_vars(&mut push);
            }
        }
        for item in &self.body {
            item.visit_vars(&mut push);
        }
        ordered
    }
}

// Spans are presentation data: clause equality is purely structural.
impl PartialEq for Clause {
    fn eq(&self, other: &Self) -> bool {
        self.head == other.head && self.body == other.body
    }
}

impl Eq for Clause {}

/// An ordered list of clauses; order equals textual order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Database {
    pub clauses: Vec<Clause>,
}

impl Database {
    pub fn new(clauses: Vec<Clause>) -> Database {
        Database { clauses }
    }

    pub fn queries(&self) -> impl Iterator<Item = &Clause> {
        self.clauses
            .iter()
            .filter(|c| c.kind() == ClauseKind::Query)
    }

    pub fn definitions(&self) -> impl Iterator<Item = &Clause> {
        self.clauses
            .iter()
            .filter(|c| c.kind() != ClauseKind::Query)
    }
}
