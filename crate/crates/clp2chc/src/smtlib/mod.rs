//! Data model for the SMT-LIB command subset used by the translation,
//! plus a deterministic printer, an S-expression reader, structural
//! equivalence for golden tests, and sort/Horn-shape checkers.

pub mod check;
pub mod compare;
pub mod printer;
pub mod reader;

pub use check::{check_horn_shapes, check_sorts, CheckError};
pub use compare::structurally_equal;
pub use printer::{emit, Style};
pub use reader::{parse_script, ScriptError};

use std::fmt;

use num_bigint::BigInt;

/// An SMT-LIB symbol, stored unquoted. The printer adds `|...|` quoting
/// when the content is not a simple symbol.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sym(String);

impl Sym {
    pub fn new(content: impl Into<String>) -> Sym {
        Sym(content.into())
    }

    pub fn content(&self) -> &str {
        &self.0
    }

    /// True when the content lexes as a simple (unquoted) symbol.
    pub fn is_simple(&self) -> bool {
        is_simple_symbol(&self.0)
    }
}

impl fmt::Display for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_simple() {
            f.write_str(&self.0)
        } else {
            write!(f, "|{}|", self.0)
        }
    }
}

impl From<&str> for Sym {
    fn from(s: &str) -> Sym {
        Sym::new(s)
    }
}

impl From<String> for Sym {
    fn from(s: String) -> Sym {
        Sym::new(s)
    }
}

pub fn is_simple_symbol(content: &str) -> bool {
    let mut chars = content.chars();
    let Some(first) = chars.next() else {
        return false;
    };
    is_symbol_char(first) && !first.is_ascii_digit() && chars.all(is_symbol_char)
}

fn is_symbol_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || "~!@$%^&*_-+=<>.?/".contains(c)
}

/// The sorts appearing in translated scripts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sort {
    U,
    L,
    Int,
    Bool,
}

impl Sort {
    pub fn name(self) -> &'static str {
        match self {
            Sort::U => "U",
            Sort::L => "L",
            Sort::Int => "Int",
            Sort::Bool => "Bool",
        }
    }

    pub fn from_name(name: &str) -> Option<Sort> {
        match name {
            "U" => Some(Sort::U),
            "L" => Some(Sort::L),
            "Int" => Some(Sort::Int),
            "Bool" => Some(Sort::Bool),
            _ => None,
        }
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// An SMT-LIB expression.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SmtTerm {
    Symbol(Sym),
    /// Integer constant; negatives print as `(- n)`.
    IntConst(BigInt),
    /// Application with at least one argument.
    Apply(Sym, Vec<SmtTerm>),
    Forall(Vec<(Sym, Sort)>, Box<SmtTerm>),
    /// Datatype tester, printed `((_ is C) t)`.
    Tester(Sym, Box<SmtTerm>),
}

impl SmtTerm {
    pub fn sym(name: impl Into<Sym>) -> SmtTerm {
        SmtTerm::Symbol(name.into())
    }

    pub fn int(value: impl Into<BigInt>) -> SmtTerm {
        SmtTerm::IntConst(value.into())
    }

    pub fn apply(head: impl Into<Sym>, args: Vec<SmtTerm>) -> SmtTerm {
        let head = head.into();
        if args.is_empty() {
            SmtTerm::Symbol(head)
        } else {
            SmtTerm::Apply(head, args)
        }
    }

    pub fn tester(constructor: impl Into<Sym>, arg: SmtTerm) -> SmtTerm {
        SmtTerm::Tester(constructor.into(), Box::new(arg))
    }

    pub fn negate(self) -> SmtTerm {
        SmtTerm::apply("not", vec![self])
    }

    pub fn equal(lhs: SmtTerm, rhs: SmtTerm) -> SmtTerm {
        SmtTerm::apply("=", vec![lhs, rhs])
    }

    pub fn fals() -> SmtTerm {
        SmtTerm::sym("false")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectorDecl {
    pub name: Sym,
    pub sort: Sort,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructorDecl {
    pub name: Sym,
    pub selectors: Vec<SelectorDecl>,
}

impl ConstructorDecl {
    pub fn nullary(name: impl Into<Sym>) -> ConstructorDecl {
        ConstructorDecl {
            name: name.into(),
            selectors: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatatypeDecl {
    pub name: Sym,
    pub constructors: Vec<ConstructorDecl>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    SetLogic(Sym),
    /// One or more mutually recursive datatypes. Whether this prints as
    /// `declare-datatype` or `declare-datatypes` is a [`Style`] question.
    DeclareDatatypes(Vec<DatatypeDecl>),
    DeclareFun {
        name: Sym,
        args: Vec<Sort>,
        result: Sort,
    },
    Assert(SmtTerm),
    CheckSat,
    GetModel,
}

/// An ordered command list: one `set-logic` first, declarations before
/// asserts, one `check-sat` last (optionally followed by `get-model`).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Script {
    pub commands: Vec<Command>,
}

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum ScriptInvariantError {
    #[error("script must start with set-logic")]
    MissingSetLogic,
    #[error("duplicate set-logic")]
    DuplicateSetLogic,
    #[error("script must end with check-sat")]
    MissingCheckSat,
    #[error("duplicate check-sat")]
    DuplicateCheckSat,
    #[error("command after check-sat")]
    CommandAfterCheckSat,
    #[error("declaration appears after an assert")]
    DeclarationAfterAssert,
}

impl Script {
    pub fn new(commands: Vec<Command>) -> Script {
        Script { commands }
    }

    pub fn validate(&self) -> Result<(), ScriptInvariantError> {
        use ScriptInvariantError as E;
        match self.commands.first() {
            Some(Command::SetLogic(_)) => {}
            _ => return Err(E::MissingSetLogic),
        }
        let mut seen_checksat = false;
        let mut seen_assert = false;
        for command in &self.commands[1..] {
            if seen_checksat && !matches!(command, Command::GetModel) {
                return Err(E::CommandAfterCheckSat);
            }
            match command {
                Command::SetLogic(_) => return Err(E::DuplicateSetLogic),
                Command::CheckSat => {
                    if seen_checksat {
                        return Err(E::DuplicateCheckSat);
                    }
                    seen_checksat = true;
                }
                Command::Assert(_) => seen_assert = true,
                Command::DeclareDatatypes(_) | Command::DeclareFun { .. } => {
                    if seen_assert {
                        return Err(E::DeclarationAfterAssert);
                    }
                }
                Command::GetModel => {}
            }
        }
        if !seen_checksat {
            return Err(E::MissingCheckSat);
        }
        Ok(())
    }

    pub fn asserts(&self) -> impl Iterator<Item = &SmtTerm> {
        self.commands.iter().filter_map(|c| match c {
            Command::Assert(t) => Some(t),
            _ => None,
        })
    }
}
