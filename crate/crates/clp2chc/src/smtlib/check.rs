//! Internal validation passes over emitted scripts: a sort checker and a
//! Horn-shape checker. Both are used by tests to guard the translator's
//! output invariants.

use std::collections::HashMap;

use super::{Command, Script, SmtTerm, Sort, Sym};

#[derive(Debug, Clone, thiserror::Error)]
pub enum CheckError {
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("`{symbol}` applied to {found} arguments, expected {expected}")]
    Arity {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("sort mismatch at `{context}`: expected {expected}, found {found}")]
    SortMismatch {
        context: String,
        expected: Sort,
        found: Sort,
    },
    #[error("assertion is not Bool-sorted")]
    NonBoolAssert,
    #[error("assertion is not a Horn clause: {0}")]
    NotHorn(String),
}

struct SymbolTable {
    /// Constructors: argument sorts and owning datatype sort.
    constructors: HashMap<String, (Vec<Sort>, Sort)>,
    /// Selectors: owning datatype sort and result sort.
    selectors: HashMap<String, (Sort, Sort)>,
    /// Declared predicates/functions.
    funs: HashMap<String, (Vec<Sort>, Sort)>,
}

impl SymbolTable {
    fn from_script(script: &Script) -> Result<Self, CheckError> {
        let mut table = SymbolTable {
            constructors: HashMap::new(),
            selectors: HashMap::new(),
            funs: HashMap::new(),
        };
        for command in &script.commands {
            match command {
                Command::DeclareDatatypes(datatypes) => {
                    for datatype in datatypes {
                        let sort = Sort::from_name(datatype.name.content()).ok_or_else(|| {
                            CheckError::UnknownSymbol(datatype.name.content().to_string())
                        })?;
                        for ctor in &datatype.constructors {
                            let args: Vec<Sort> = ctor.selectors.iter().map(|s| s.sort).collect();
                            table
                                .constructors
                                .insert(ctor.name.content().to_string(), (args, sort));
                            for selector in &ctor.selectors {
                                table.selectors.insert(
                                    selector.name.content().to_string(),
                                    (sort, selector.sort),
                                );
                            }
                        }
                    }
                }
                Command::DeclareFun { name, args, result } => {
                    table
                        .funs
                        .insert(name.content().to_string(), (args.clone(), *result));
                }
                _ => {}
            }
        }
        Ok(table)
    }
}

/// Check that every assertion type-checks under the script's declarations.
pub fn check_sorts(script: &Script) -> Result<(), CheckError> {
    let table = SymbolTable::from_script(script)?;
    for assert in script.asserts() {
        let sort = infer(assert, &table, &mut Vec::new())?;
        if sort != Sort::Bool {
            return Err(CheckError::NonBoolAssert);
        }
    }
    Ok(())
}

fn expect_args(
    symbol: &str,
    expected: &[Sort],
    args: &[SmtTerm],
    table: &SymbolTable,
    bound: &mut Vec<(Sym, Sort)>,
) -> Result<(), CheckError> {
    if expected.len() != args.len() {
        return Err(CheckError::Arity {
            symbol: symbol.to_string(),
            expected: expected.len(),
            found: args.len(),
        });
    }
    for (want, arg) in expected.iter().zip(args) {
        let got = infer(arg, table, bound)?;
        if got != *want {
            return Err(CheckError::SortMismatch {
                context: symbol.to_string(),
                expected: *want,
                found: got,
            });
        }
    }
    Ok(())
}

fn infer(
    term: &SmtTerm,
    table: &SymbolTable,
    bound: &mut Vec<(Sym, Sort)>,
) -> Result<Sort, CheckError> {
    match term {
        SmtTerm::IntConst(_) => Ok(Sort::Int),
        SmtTerm::Symbol(sym) => {
            let name = sym.content();
            if let Some((_, sort)) = bound.iter().rev().find(|(s, _)| s == sym) {
                return Ok(*sort);
            }
            if name == "true" || name == "false" {
                return Ok(Sort::Bool);
            }
            if let Some((args, sort)) = table.constructors.get(name) {
                if args.is_empty() {
                    return Ok(*sort);
                }
            }
            if let Some((args, sort)) = table.funs.get(name) {
                if args.is_empty() {
                    return Ok(*sort);
                }
                return Err(CheckError::Arity {
                    symbol: name.to_string(),
                    expected: args.len(),
                    found: 0,
                });
            }
            Err(CheckError::UnknownSymbol(name.to_string()))
        }
        SmtTerm::Tester(ctor, arg) => {
            let (_, datatype) = table
                .constructors
                .get(ctor.content())
                .ok_or_else(|| CheckError::UnknownSymbol(ctor.content().to_string()))?;
            let got = infer(arg, table, bound)?;
            if got != *datatype {
                return Err(CheckError::SortMismatch {
                    context: format!("(_ is {ctor})"),
                    expected: *datatype,
                    found: got,
                });
            }
            Ok(Sort::Bool)
        }
        SmtTerm::Forall(bindings, body) => {
            let depth = bound.len();
            bound.extend(bindings.iter().cloned());
            let sort = infer(body, table, bound)?;
            bound.truncate(depth);
            if sort != Sort::Bool {
                return Err(CheckError::SortMismatch {
                    context: "forall body".to_string(),
                    expected: Sort::Bool,
                    found: sort,
                });
            }
            Ok(Sort::Bool)
        }
        SmtTerm::Apply(head, args) => {
            let name = head.content();
            match name {
                "and" | "or" => {
                    for arg in args {
                        expect_args(name, &[Sort::Bool], std::slice::from_ref(arg), table, bound)?;
                    }
                    Ok(Sort::Bool)
                }
                "=>" => {
                    expect_args(name, &[Sort::Bool, Sort::Bool], args, table, bound)?;
                    Ok(Sort::Bool)
                }
                "not" => {
                    expect_args(name, &[Sort::Bool], args, table, bound)?;
                    Ok(Sort::Bool)
                }
                "=" | "distinct" => {
                    if args.len() != 2 {
                        return Err(CheckError::Arity {
                            symbol: name.to_string(),
                            expected: 2,
                            found: args.len(),
                        });
                    }
                    let lhs = infer(&args[0], table, bound)?;
                    let rhs = infer(&args[1], table, bound)?;
                    if lhs != rhs {
                        return Err(CheckError::SortMismatch {
                            context: name.to_string(),
                            expected: lhs,
                            found: rhs,
                        });
                    }
                    Ok(Sort::Bool)
                }
                "<" | "<=" | ">" | ">=" => {
                    expect_args(name, &[Sort::Int, Sort::Int], args, table, bound)?;
                    Ok(Sort::Bool)
                }
                "+" | "*" | "div" | "mod" => {
                    expect_args(name, &[Sort::Int, Sort::Int], args, table, bound)?;
                    Ok(Sort::Int)
                }
                "-" => {
                    // Unary or binary minus.
                    if args.len() == 1 {
                        expect_args(name, &[Sort::Int], args, table, bound)?;
                    } else {
                        expect_args(name, &[Sort::Int, Sort::Int], args, table, bound)?;
                    }
                    Ok(Sort::Int)
                }
                _ => {
                    if let Some((expected, sort)) = table.constructors.get(name) {
                        expect_args(name, expected, args, table, bound)?;
                        return Ok(*sort);
                    }
                    if let Some((datatype, result)) = table.selectors.get(name) {
                        expect_args(name, &[*datatype], args, table, bound)?;
                        return Ok(*result);
                    }
                    if let Some((expected, result)) = table.funs.get(name) {
                        let expected = expected.clone();
                        let result = *result;
                        expect_args(name, &expected, args, table, bound)?;
                        return Ok(result);
                    }
                    Err(CheckError::UnknownSymbol(name.to_string()))
                }
            }
        }
    }
}

/// Check that every assertion is one of the clause shapes accepted by CHC
/// solvers: a (possibly quantified) predicate fact, a rule with a single
/// positive predicate consequent, or a query implying `false`, with only
/// predicate applications and theory atoms in the antecedent.
pub fn check_horn_shapes(script: &Script) -> Result<(), CheckError> {
    let predicates: HashMap<String, usize> = script
        .commands
        .iter()
        .filter_map(|c| match c {
            Command::DeclareFun { name, args, .. } => {
                Some((name.content().to_string(), args.len()))
            }
            _ => None,
        })
        .collect();

    for assert in script.asserts() {
        let body = match assert {
            SmtTerm::Forall(_, body) => body.as_ref(),
            other => other,
        };
        match body {
            SmtTerm::Apply(head, args) if head.content() == "=>" && args.len() == 2 => {
                check_antecedent(&args[0], &predicates)?;
                check_consequent(&args[1], &predicates)?;
            }
            other => {
                if !is_predicate_app(other, &predicates) {
                    return Err(CheckError::NotHorn(
                        "unquantified body must be a predicate application".to_string(),
                    ));
                }
            }
        }
    }
    Ok(())
}

fn check_antecedent(term: &SmtTerm, predicates: &HashMap<String, usize>) -> Result<(), CheckError> {
    let conjuncts: Vec<&SmtTerm> = match term {
        SmtTerm::Apply(head, args) if head.content() == "and" => args.iter().collect(),
        other => vec![other],
    };
    for conjunct in conjuncts {
        if !is_predicate_app(conjunct, predicates) && !is_theory_atom(conjunct) {
            return Err(CheckError::NotHorn(format!(
                "antecedent conjunct is neither a predicate application nor a theory atom: {}",
                super::printer::render(conjunct)
            )));
        }
    }
    Ok(())
}

fn check_consequent(term: &SmtTerm, predicates: &HashMap<String, usize>) -> Result<(), CheckError> {
    match term {
        SmtTerm::Symbol(sym) if sym.content() == "false" => Ok(()),
        other if is_predicate_app(other, predicates) => Ok(()),
        other => Err(CheckError::NotHorn(format!(
            "consequent must be a predicate application or `false`: {}",
            super::printer::render(other)
        ))),
    }
}

fn is_predicate_app(term: &SmtTerm, predicates: &HashMap<String, usize>) -> bool {
    match term {
        SmtTerm::Symbol(sym) => predicates.get(sym.content()) == Some(&0),
        SmtTerm::Apply(head, args) => predicates.get(head.content()) == Some(&args.len()),
        _ => false,
    }
}

/// Equations, disequations, comparisons, and testers over theory terms.
fn is_theory_atom(term: &SmtTerm) -> bool {
    match term {
        SmtTerm::Tester(..) => true,
        SmtTerm::Symbol(sym) => matches!(sym.content(), "true" | "false"),
        SmtTerm::Apply(head, args) => match head.content() {
            "=" | "distinct" | "<" | "<=" | ">" | ">=" => true,
            "not" => args.len() == 1 && is_theory_atom(&args[0]),
            _ => false,
        },
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse_script;
    use super::*;

    const PREAMBLE: &str = "(set-logic HORN)\n\
        (declare-datatypes () (\n\
          (U (anInt (theInt Int)) (aList (theList L)) (father (father_1 U)) claire)\n\
          (L nil (cons (head U) (tail L)))))\n\
        (declare-fun man (U) Bool)\n\
        (declare-fun q () Bool)\n";

    fn check(asserts: &str) -> (Result<(), CheckError>, Result<(), CheckError>) {
        let script = parse_script(&format!("{PREAMBLE}{asserts}\n(check-sat)\n")).unwrap();
        (check_sorts(&script), check_horn_shapes(&script))
    }

    #[test]
    fn well_sorted_horn_clause_passes() {
        let (sorts, horn) = check(
            "(assert (forall ((X U)) (=> (and (man X) ((_ is anInt) X) (< (theInt X) 4)) (man (father X)))))",
        );
        sorts.unwrap();
        horn.unwrap();
    }

    #[test]
    fn ground_fact_and_query_pass() {
        let (sorts, horn) =
            check("(assert (man (father claire)))\n(assert (forall ((X U)) (=> (man X) false)))");
        sorts.unwrap();
        horn.unwrap();
    }

    #[test]
    fn constructor_argument_must_be_u() {
        let (sorts, _) = check("(assert (man (father (theInt (anInt 3)))))");
        assert!(matches!(sorts, Err(CheckError::SortMismatch { .. })));
    }

    #[test]
    fn the_int_requires_u_argument() {
        let (sorts, _) = check("(assert (forall ((X U)) (=> (< (theInt (theInt X)) 3) (man X))))");
        assert!(sorts.is_err());
    }

    #[test]
    fn arithmetic_requires_int_operands() {
        let (sorts, _) = check("(assert (forall ((X U)) (=> (< X 3) (man X))))");
        assert!(matches!(sorts, Err(CheckError::SortMismatch { .. })));
    }

    #[test]
    fn negated_predicate_in_antecedent_is_not_horn() {
        let (sorts, horn) = check("(assert (forall ((X U)) (=> (not (man X)) (man X))))");
        sorts.unwrap();
        assert!(matches!(horn, Err(CheckError::NotHorn(_))));
    }

    #[test]
    fn predicate_disjunction_in_consequent_is_not_horn() {
        let (_, horn) = check("(assert (forall ((X U)) (=> (man X) (and (man X) q))))");
        assert!(matches!(horn, Err(CheckError::NotHorn(_))));
    }

    #[test]
    fn unquantified_rule_shape_is_accepted() {
        let (sorts, horn) = check("(assert (=> q q))");
        sorts.unwrap();
        horn.unwrap();
    }

    #[test]
    fn unknown_symbol_is_reported() {
        let (sorts, _) = check("(assert (man (mother claire)))");
        assert!(matches!(sorts, Err(CheckError::UnknownSymbol(name)) if name == "mother"));
    }
}
