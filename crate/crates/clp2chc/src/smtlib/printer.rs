//! Deterministic text emission for [`Script`]s.
//!
//! Commands are newline-terminated. Asserts that do not fit in 120 columns
//! break onto multiple lines with 4-space indentation. The `Legacy` style
//! prints datatypes as `(declare-datatypes () (...))` with bare nullary
//! constructors; `Modern` uses `declare-datatype` for a single sort and the
//! arity-annotated `declare-datatypes` form otherwise.

use std::fmt::Write;

use super::{Command, ConstructorDecl, DatatypeDecl, Script, SmtTerm};

pub const MAX_LINE: usize = 120;
const INDENT: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Style {
    #[default]
    Modern,
    Legacy,
}

pub fn emit(script: &Script, style: Style) -> String {
    let mut out = String::new();
    for command in &script.commands {
        emit_command(&mut out, command, style);
        out.push('\n');
    }
    out
}

fn emit_command(out: &mut String, command: &Command, style: Style) {
    match command {
        Command::SetLogic(logic) => {
            let _ = write!(out, "(set-logic {logic})");
        }
        Command::DeclareDatatypes(datatypes) => emit_datatypes(out, datatypes, style),
        Command::DeclareFun { name, args, result } => {
            let args = args
                .iter()
                .map(|sort| sort.name())
                .collect::<Vec<_>>()
                .join(" ");
            let _ = write!(out, "(declare-fun {name} ({args}) {result})");
        }
        Command::Assert(term) => {
            let inline = format!("(assert {})", render(term));
            if inline.len() <= MAX_LINE {
                out.push_str(&inline);
            } else {
                out.push_str("(assert\n");
                emit_term(out, term, INDENT, 1);
                out.push(')');
            }
        }
        Command::CheckSat => out.push_str("(check-sat)"),
        Command::GetModel => out.push_str("(get-model)"),
    }
}

fn emit_datatypes(out: &mut String, datatypes: &[DatatypeDecl], style: Style) {
    match style {
        Style::Modern if datatypes.len() == 1 => {
            let datatype = &datatypes[0];
            let ctors = datatype
                .constructors
                .iter()
                .map(|c| render_constructor(c, style))
                .collect::<Vec<_>>()
                .join(" ");
            let inline = format!("(declare-datatype {} ({ctors}))", datatype.name);
            if inline.len() <= MAX_LINE {
                out.push_str(&inline);
            } else {
                let _ = write!(out, "(declare-datatype {} (", datatype.name);
                for ctor in &datatype.constructors {
                    out.push('\n');
                    out.push_str(&" ".repeat(INDENT));
                    out.push_str(&render_constructor(ctor, style));
                }
                out.push_str("))");
            }
        }
        Style::Modern => {
            let heads = datatypes
                .iter()
                .map(|d| format!("({} 0)", d.name))
                .collect::<Vec<_>>()
                .join(" ");
            let _ = write!(out, "(declare-datatypes ({heads}) (");
            for (i, datatype) in datatypes.iter().enumerate() {
                out.push('\n');
                out.push_str(&" ".repeat(INDENT));
                emit_constructor_list(out, &datatype.constructors, style, i);
            }
            out.push_str("))");
        }
        Style::Legacy => {
            out.push_str("(declare-datatypes () (");
            for datatype in datatypes {
                out.push('\n');
                out.push_str(&" ".repeat(INDENT));
                let _ = write!(out, "({}", datatype.name);
                for ctor in &datatype.constructors {
                    out.push('\n');
                    out.push_str(&" ".repeat(2 * INDENT));
                    out.push_str(&render_constructor(ctor, style));
                }
                out.push(')');
            }
            out.push_str("))");
        }
    }
}

fn emit_constructor_list(
    out: &mut String,
    constructors: &[ConstructorDecl],
    style: Style,
    _index: usize,
) {
    let inline = format!(
        "({})",
        constructors
            .iter()
            .map(|c| render_constructor(c, style))
            .collect::<Vec<_>>()
            .join(" ")
    );
    if INDENT + inline.len() <= MAX_LINE {
        out.push_str(&inline);
    } else {
        out.push('(');
        for ctor in constructors {
            out.push('\n');
            out.push_str(&" ".repeat(2 * INDENT));
            out.push_str(&render_constructor(ctor, style));
        }
        out.push(')');
    }
}

fn render_constructor(ctor: &ConstructorDecl, style: Style) -> String {
    if ctor.selectors.is_empty() {
        match style {
            // Legacy scripts list nullary constructors as bare symbols.
            Style::Legacy => ctor.name.to_string(),
            Style::Modern => format!("({})", ctor.name),
        }
    } else {
        let selectors = ctor
            .selectors
            .iter()
            .map(|s| format!("({} {})", s.name, s.sort))
            .collect::<Vec<_>>()
            .join(" ");
        format!("({} {selectors})", ctor.name)
    }
}

/// Single-line rendering of a term.
pub fn render(term: &SmtTerm) -> String {
    let mut out = String::new();
    render_into(&mut out, term);
    out
}

fn render_into(out: &mut String, term: &SmtTerm) {
    match term {
        SmtTerm::Symbol(sym) => {
            let _ = write!(out, "{sym}");
        }
        SmtTerm::IntConst(value) => {
            if value.sign() == num_bigint::Sign::Minus {
                let _ = write!(out, "(- {})", -value);
            } else {
                let _ = write!(out, "{value}");
            }
        }
        SmtTerm::Apply(head, args) => {
            let _ = write!(out, "({head}");
            for arg in args {
                out.push(' ');
                render_into(out, arg);
            }
            out.push(')');
        }
        SmtTerm::Forall(bindings, body) => {
            out.push_str("(forall (");
            for (i, (name, sort)) in bindings.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                let _ = write!(out, "({name} {sort})");
            }
            out.push_str(") ");
            render_into(out, body);
            out.push(')');
        }
        SmtTerm::Tester(constructor, arg) => {
            let _ = write!(out, "((_ is {constructor}) ");
            render_into(out, arg);
            out.push(')');
        }
    }
}

/// Multi-line emission at the given indent; used when a term does not fit
/// on one line. `reserve` counts the closing parentheses that enclosing
/// terms will append to this term's final line.
fn emit_term(out: &mut String, term: &SmtTerm, indent: usize, reserve: usize) {
    let inline = render(term);
    if indent + inline.len() + reserve <= MAX_LINE {
        out.push_str(&" ".repeat(indent));
        out.push_str(&inline);
        return;
    }
    let pad = " ".repeat(indent);
    match term {
        SmtTerm::Symbol(_) | SmtTerm::IntConst(_) => {
            out.push_str(&pad);
            out.push_str(&inline);
        }
        SmtTerm::Apply(head, args) => {
            let _ = write!(out, "{pad}({head}");
            let last = args.len() - 1;
            for (i, arg) in args.iter().enumerate() {
                out.push('\n');
                let child_reserve = if i == last { reserve + 1 } else { 0 };
                emit_term(out, arg, indent + INDENT, child_reserve);
            }
            out.push(')');
        }
        SmtTerm::Forall(bindings, body) => {
            let _ = write!(out, "{pad}(forall (");
            let bindings_inline = bindings
                .iter()
                .map(|(name, sort)| format!("({name} {sort})"))
                .collect::<Vec<_>>()
                .join(" ");
            if indent + 10 + bindings_inline.len() <= MAX_LINE {
                out.push_str(&bindings_inline);
                out.push(')');
            } else {
                for (name, sort) in bindings {
                    out.push('\n');
                    let _ = write!(out, "{pad}    ({name} {sort})");
                }
                out.push(')');
            }
            out.push('\n');
            emit_term(out, body, indent + INDENT, reserve + 1);
            out.push(')');
        }
        SmtTerm::Tester(constructor, arg) => {
            let _ = write!(out, "{pad}((_ is {constructor})");
            out.push('\n');
            emit_term(out, arg, indent + INDENT, reserve + 1);
            out.push(')');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::{Command, ConstructorDecl, DatatypeDecl, Script, SelectorDecl, Sort};
    use super::*;

    fn claire_script() -> Script {
        Script::new(vec![
            Command::SetLogic("HORN".into()),
            Command::DeclareDatatypes(vec![DatatypeDecl {
                name: "U".into(),
                constructors: vec![
                    ConstructorDecl {
                        name: "father".into(),
                        selectors: vec![SelectorDecl {
                            name: "father_1".into(),
                            sort: Sort::U,
                        }],
                    },
                    ConstructorDecl::nullary("claire"),
                ],
            }]),
            Command::DeclareFun {
                name: "man".into(),
                args: vec![Sort::U],
                result: Sort::Bool,
            },
            Command::Assert(SmtTerm::apply(
                "man",
                vec![SmtTerm::apply("father", vec![SmtTerm::sym("claire")])],
            )),
            Command::CheckSat,
        ])
    }

    #[test]
    fn modern_claire_layout() {
        let text = emit(&claire_script(), Style::Modern);
        assert_eq!(
            text,
            "(set-logic HORN)\n\
             (declare-datatype U ((father (father_1 U)) (claire)))\n\
             (declare-fun man (U) Bool)\n\
             (assert (man (father claire)))\n\
             (check-sat)\n"
        );
    }

    #[test]
    fn legacy_uses_declare_datatypes_with_bare_nullaries() {
        let text = emit(&claire_script(), Style::Legacy);
        assert!(text.contains("(declare-datatypes () ("));
        assert!(text.contains("claire"));
        assert!(!text.contains("(claire)"));
    }

    #[test]
    fn negative_integers_render_with_minus_application() {
        assert_eq!(render(&SmtTerm::int(-7)), "(- 7)");
        assert_eq!(render(&SmtTerm::int(7)), "7");
    }

    #[test]
    fn quoted_symbols_round_trip_pipes() {
        assert_eq!(render(&SmtTerm::sym("hello world")), "|hello world|");
    }

    #[test]
    fn long_asserts_break_within_line_limit() {
        let conjuncts: Vec<SmtTerm> = (0..20)
            .map(|i| {
                SmtTerm::apply(
                    format!("some_rather_long_predicate_{i}").as_str(),
                    vec![SmtTerm::sym("X"), SmtTerm::sym("Y")],
                )
            })
            .collect();
        let term = SmtTerm::Forall(
            vec![("X".into(), Sort::U), ("Y".into(), Sort::U)],
            Box::new(SmtTerm::apply(
                "=>",
                vec![SmtTerm::apply("and", conjuncts), SmtTerm::fals()],
            )),
        );
        let script = Script::new(vec![
            Command::SetLogic("HORN".into()),
            Command::Assert(term),
            Command::CheckSat,
        ]);
        let text = emit(&script, Style::Modern);
        for line in text.lines() {
            assert!(line.len() <= MAX_LINE, "line too long: {line}");
        }
    }
}
