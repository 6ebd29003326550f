//! Reader for emitted `.smt2` scripts and for golden files.
//!
//! Accepts the command subset used by the translation (`set-logic`,
//! `declare-datatype`/`declare-datatypes` in both the legacy and the
//! arity-annotated style, `declare-fun`, `assert`, `check-sat`, and a
//! `get-model` passthrough) and enforces the script invariants.

use num_bigint::BigInt;

use super::{Command, ConstructorDecl, DatatypeDecl, Script, SelectorDecl, SmtTerm, Sort, Sym};

#[derive(Debug, Clone, thiserror::Error)]
pub enum ScriptError {
    #[error("{line}:{column}: malformed s-expression: {message}")]
    Sexpr {
        line: u32,
        column: u32,
        message: String,
    },
    #[error("unknown command `{0}`")]
    UnknownCommand(String),
    #[error("malformed `{command}` command: {message}")]
    BadCommand { command: String, message: String },
    #[error("malformed term: {0}")]
    BadTerm(String),
    #[error("unknown sort `{0}`")]
    UnknownSort(String),
    #[error("invalid script: {0}")]
    Invariant(#[from] super::ScriptInvariantError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Sexpr {
    Sym(String),
    Num(BigInt),
    List(Vec<Sexpr>),
}

impl Sexpr {
    fn describe(&self) -> String {
        match self {
            Sexpr::Sym(s) => format!("symbol `{s}`"),
            Sexpr::Num(n) => format!("numeral `{n}`"),
            Sexpr::List(_) => "list".to_string(),
        }
    }
}

struct Reader<'a> {
    src: &'a str,
    pos: usize,
    line: u32,
    column: u32,
}

impl<'a> Reader<'a> {
    fn error(&self, message: impl Into<String>) -> ScriptError {
        ScriptError::Sexpr {
            line: self.line,
            column: self.column,
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
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

    fn skip_trivia(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some(';') => {
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                _ => break,
            }
        }
    }

    fn read(&mut self) -> Result<Option<Sexpr>, ScriptError> {
        self.skip_trivia();
        let Some(ch) = self.peek() else {
            return Ok(None);
        };
        match ch {
            '(' => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_trivia();
                    match self.peek() {
                        Some(')') => {
                            self.bump();
                            return Ok(Some(Sexpr::List(items)));
                        }
                        Some(_) => match self.read()? {
                            Some(item) => items.push(item),
                            None => return Err(self.error("unclosed `(`")),
                        },
                        None => return Err(self.error("unclosed `(`")),
                    }
                }
            }
            ')' => Err(self.error("unexpected `)`")),
            '|' => {
                self.bump();
                let mut content = String::new();
                loop {
                    match self.bump() {
                        Some('|') => return Ok(Some(Sexpr::Sym(content))),
                        Some('\\') => return Err(self.error("`\\` in quoted symbol")),
                        Some(c) => content.push(c),
                        None => return Err(self.error("unterminated quoted symbol")),
                    }
                }
            }
            c if c.is_ascii_digit() => {
                let start = self.pos;
                while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                    self.bump();
                }
                let digits = &self.src[start..self.pos];
                Ok(Some(Sexpr::Num(digits.parse().expect("decimal digits"))))
            }
            c if super::is_symbol_char(c) => {
                let start = self.pos;
                while matches!(self.peek(), Some(c) if super::is_symbol_char(c)) {
                    self.bump();
                }
                Ok(Some(Sexpr::Sym(self.src[start..self.pos].to_string())))
            }
            c => Err(self.error(format!("unexpected character `{c}`"))),
        }
    }
}

/// Parse a full script and validate its invariants.
pub fn parse_script(text: &str) -> Result<Script, ScriptError> {
    let mut reader = Reader {
        src: text,
        pos: 0,
        line: 1,
        column: 1,
    };
    let mut commands = Vec::new();
    while let Some(sexpr) = reader.read()? {
        commands.push(parse_command(&sexpr)?);
    }
    let script = Script::new(commands);
    script.validate()?;
    Ok(script)
}

fn bad(command: &str, message: impl Into<String>) -> ScriptError {
    ScriptError::BadCommand {
        command: command.to_string(),
        message: message.into(),
    }
}

fn as_sym<'a>(sexpr: &'a Sexpr, context: &str) -> Result<&'a str, ScriptError> {
    match sexpr {
        Sexpr::Sym(s) => Ok(s),
        other => Err(ScriptError::BadTerm(format!(
            "expected symbol in {context}, found {}",
            other.describe()
        ))),
    }
}

fn parse_sort(sexpr: &Sexpr) -> Result<Sort, ScriptError> {
    let name = as_sym(sexpr, "sort position")?;
    Sort::from_name(name).ok_or_else(|| ScriptError::UnknownSort(name.to_string()))
}

fn parse_command(sexpr: &Sexpr) -> Result<Command, ScriptError> {
    let Sexpr::List(items) = sexpr else {
        return Err(ScriptError::BadTerm("top-level form must be a list".into()));
    };
    let Some(head) = items.first() else {
        return Err(ScriptError::BadTerm("empty command".into()));
    };
    let head = as_sym(head, "command position")?;
    match head {
        "set-logic" => match items.as_slice() {
            [_, Sexpr::Sym(logic)] => Ok(Command::SetLogic(Sym::new(logic.clone()))),
            _ => Err(bad(head, "expected one logic name")),
        },
        "check-sat" => Ok(Command::CheckSat),
        "get-model" => Ok(Command::GetModel),
        "assert" => match items.as_slice() {
            [_, term] => Ok(Command::Assert(parse_term(term)?)),
            _ => Err(bad(head, "expected exactly one term")),
        },
        "declare-fun" => match items.as_slice() {
            [_, name, Sexpr::List(args), result] => Ok(Command::DeclareFun {
                name: Sym::new(as_sym(name, "declare-fun name")?),
                args: args.iter().map(parse_sort).collect::<Result<_, _>>()?,
                result: parse_sort(result)?,
            }),
            _ => Err(bad(head, "expected name, argument sorts, result sort")),
        },
        "declare-datatype" => match items.as_slice() {
            [_, name, Sexpr::List(ctors)] => {
                let datatype = DatatypeDecl {
                    name: Sym::new(as_sym(name, "datatype name")?),
                    constructors: ctors
                        .iter()
                        .map(parse_constructor)
                        .collect::<Result<_, _>>()?,
                };
                Ok(Command::DeclareDatatypes(vec![datatype]))
            }
            _ => Err(bad(head, "expected sort name and constructor list")),
        },
        "declare-datatypes" => parse_declare_datatypes(items),
        other => Err(ScriptError::UnknownCommand(other.to_string())),
    }
}

fn parse_declare_datatypes(items: &[Sexpr]) -> Result<Command, ScriptError> {
    let [_, heads, Sexpr::List(bodies)] = items else {
        return Err(bad("declare-datatypes", "expected two argument lists"));
    };
    let Sexpr::List(heads) = heads else {
        return Err(bad("declare-datatypes", "expected sort list"));
    };
    let datatypes = if heads.is_empty() {
        // Legacy style: sorts are named inside the body list.
        bodies
            .iter()
            .map(|body| {
                let Sexpr::List(parts) = body else {
                    return Err(bad("declare-datatypes", "expected (Sort ctor ...)"));
                };
                let Some((name, ctors)) = parts.split_first() else {
                    return Err(bad("declare-datatypes", "empty datatype"));
                };
                Ok(DatatypeDecl {
                    name: Sym::new(as_sym(name, "datatype name")?),
                    constructors: ctors
                        .iter()
                        .map(parse_constructor)
                        .collect::<Result<_, _>>()?,
                })
            })
            .collect::<Result<Vec<_>, _>>()?
    } else {
        // Modern style: `((U 0) (L 0)) ((ctors...) (ctors...))`.
        if heads.len() != bodies.len() {
            return Err(bad(
                "declare-datatypes",
                "sort list and body list differ in length",
            ));
        }
        heads
            .iter()
            .zip(bodies)
            .map(|(sort_decl, body)| {
                let name = match sort_decl {
                    Sexpr::List(parts) => match parts.as_slice() {
                        [name, Sexpr::Num(_)] => as_sym(name, "sort name")?,
                        _ => return Err(bad("declare-datatypes", "expected (Sort arity)")),
                    },
                    other => as_sym(other, "sort name")?,
                };
                let Sexpr::List(ctors) = body else {
                    return Err(bad("declare-datatypes", "expected constructor list"));
                };
                Ok(DatatypeDecl {
                    name: Sym::new(name),
                    constructors: ctors
                        .iter()
                        .map(parse_constructor)
                        .collect::<Result<_, _>>()?,
                })
            })
            .collect::<Result<Vec<_>, _>>()?
    };
    Ok(Command::DeclareDatatypes(datatypes))
}

fn parse_constructor(sexpr: &Sexpr) -> Result<ConstructorDecl, ScriptError> {
    match sexpr {
        // Legacy scripts list nullary constructors bare.
        Sexpr::Sym(name) => Ok(ConstructorDecl::nullary(Sym::new(name.clone()))),
        Sexpr::List(parts) => {
            let Some((name, selectors)) = parts.split_first() else {
                return Err(ScriptError::BadTerm("empty constructor".into()));
            };
            Ok(ConstructorDecl {
                name: Sym::new(as_sym(name, "constructor name")?),
                selectors: selectors
                    .iter()
                    .map(|s| match s {
                        Sexpr::List(pair) => match pair.as_slice() {
                            [name, sort] => Ok(SelectorDecl {
                                name: Sym::new(as_sym(name, "selector name")?),
                                sort: parse_sort(sort)?,
                            }),
                            _ => Err(ScriptError::BadTerm("expected (selector Sort)".into())),
                        },
                        other => Err(ScriptError::BadTerm(format!(
                            "expected selector declaration, found {}",
                            other.describe()
                        ))),
                    })
                    .collect::<Result<_, _>>()?,
            })
        }
        Sexpr::Num(n) => Err(ScriptError::BadTerm(format!(
            "numeral `{n}` in constructor position"
        ))),
    }
}

fn parse_term(sexpr: &Sexpr) -> Result<SmtTerm, ScriptError> {
    match sexpr {
        Sexpr::Sym(name) => Ok(SmtTerm::sym(name.as_str())),
        Sexpr::Num(value) => Ok(SmtTerm::IntConst(value.clone())),
        Sexpr::List(items) => {
            let Some((head, args)) = items.split_first() else {
                return Err(ScriptError::BadTerm("empty application".into()));
            };
            match head {
                Sexpr::Sym(name) if name == "forall" => {
                    let [bindings, body] = args else {
                        return Err(ScriptError::BadTerm(
                            "forall expects bindings and a body".into(),
                        ));
                    };
                    let Sexpr::List(bindings) = bindings else {
                        return Err(ScriptError::BadTerm("forall expects a binding list".into()));
                    };
                    let bindings = bindings
                        .iter()
                        .map(|b| match b {
                            Sexpr::List(pair) => match pair.as_slice() {
                                [name, sort] => Ok((
                                    Sym::new(as_sym(name, "bound variable")?),
                                    parse_sort(sort)?,
                                )),
                                _ => Err(ScriptError::BadTerm("expected (var Sort)".into())),
                            },
                            other => Err(ScriptError::BadTerm(format!(
                                "expected binding, found {}",
                                other.describe()
                            ))),
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    Ok(SmtTerm::Forall(bindings, Box::new(parse_term(body)?)))
                }
                Sexpr::Sym(name) => {
                    let args = args.iter().map(parse_term).collect::<Result<Vec<_>, _>>()?;
                    if args.is_empty() {
                        return Err(ScriptError::BadTerm(format!(
                            "application of `{name}` without arguments"
                        )));
                    }
                    // `(- 7)` is the SMT-LIB spelling of a negative literal.
                    // `(- 0)` stays an application: it already equals `0`,
                    // so collapsing it would be lossy.
                    if name == "-" && args.len() == 1 {
                        if let SmtTerm::IntConst(value) = &args[0] {
                            if value.sign() == num_bigint::Sign::Plus {
                                return Ok(SmtTerm::IntConst(-value));
                            }
                        }
                    }
                    Ok(SmtTerm::Apply(Sym::new(name.clone()), args))
                }
                Sexpr::List(parts) => {
                    // `((_ is C) t)`
                    match parts.as_slice() {
                        [Sexpr::Sym(underscore), Sexpr::Sym(is), ctor]
                            if underscore == "_" && is == "is" =>
                        {
                            let [arg] = args else {
                                return Err(ScriptError::BadTerm(
                                    "tester expects exactly one argument".into(),
                                ));
                            };
                            Ok(SmtTerm::tester(
                                as_sym(ctor, "tester constructor")?,
                                parse_term(arg)?,
                            ))
                        }
                        _ => Err(ScriptError::BadTerm(
                            "only `(_ is C)` is supported in head position".into(),
                        )),
                    }
                }
                Sexpr::Num(n) => Err(ScriptError::BadTerm(format!(
                    "numeral `{n}` cannot head an application"
                ))),
            }
        }
    }
}
