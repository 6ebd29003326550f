//! The translation judgements from Prolog terms and clauses to SMT-LIB.
//!
//! Every term judgement produces a translated term plus a set of side
//! conditions: typing assumptions of the form `((_ is anInt) t)` or
//! `((_ is aList) t)` that end up in the clause antecedent. Atoms and
//! functions become constructors of the universal sort `U`; lists are
//! wrapped through the `aList`/`theList` pair and integers through
//! `anInt`/`theInt`.
//!
//! `#=` (and its aliases `is`, `=:=`) translates through the equality
//! judgement, so `D #= P + Q` becomes `(= D (anInt (+ (theInt P)
//! (theInt Q))))`; the remaining comparison operators unwrap both sides
//! with `theInt` and assume both are integers.

use crate::diagnostics::{Diagnostic, Span};
use crate::signatures::{
    collect_functions, collect_predicates, detect_features, FeatureSet, FunctionSig, NameTable,
    PredicateSig,
};
use crate::smtlib::{
    Command, ConstructorDecl, DatatypeDecl, Script, SelectorDecl, SmtTerm, Sort, Sym,
};
use crate::syntax::{ArithOp, BodyItem, Clause, ClauseKind, ConstraintOp, Database, Term};

/// A typing assumption produced by the translation rules.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SideCondition {
    IsList(SmtTerm),
    IsInt(SmtTerm),
}

impl SideCondition {
    pub fn to_term(&self) -> SmtTerm {
        match self {
            SideCondition::IsList(t) => SmtTerm::tester("aList", t.clone()),
            SideCondition::IsInt(t) => SmtTerm::tester("anInt", t.clone()),
        }
    }

    /// Conditions on freshly wrapped terms hold by construction.
    fn is_tautology(&self) -> bool {
        match self {
            SideCondition::IsList(SmtTerm::Apply(head, _)) => head.content() == "aList",
            SideCondition::IsInt(SmtTerm::Apply(head, _)) => head.content() == "anInt",
            _ => false,
        }
    }
}

/// Duplicate-free set of side conditions in insertion order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Conditions(Vec<SideCondition>);

impl Conditions {
    pub fn new() -> Conditions {
        Conditions::default()
    }

    pub fn push(&mut self, condition: SideCondition) {
        if !self.0.contains(&condition) {
            self.0.push(condition);
        }
    }

    pub fn extend(&mut self, other: Conditions) {
        for condition in other.0 {
            self.push(condition);
        }
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &SideCondition> {
        self.0.iter()
    }

    pub fn into_vec(self) -> Vec<SideCondition> {
        self.0
    }
}

/// Result of a translation judgement `s ▷ s' : Φ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JudgementResult {
    pub translated: SmtTerm,
    pub conditions: Conditions,
}

impl JudgementResult {
    fn plain(translated: SmtTerm) -> JudgementResult {
        JudgementResult {
            translated,
            conditions: Conditions::new(),
        }
    }
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum TranslateError {
    #[error("negation of user predicate `{predicate}` leaves the Horn fragment")]
    NegatedPredicate {
        predicate: String,
        span: Option<Span>,
    },
}

impl TranslateError {
    pub fn span(&self) -> Option<Span> {
        match self {
            TranslateError::NegatedPredicate { span, .. } => *span,
        }
    }

    fn with_span(self, clause_span: Span) -> TranslateError {
        match self {
            TranslateError::NegatedPredicate { predicate, .. } => {
                TranslateError::NegatedPredicate {
                    predicate,
                    span: Some(clause_span),
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct TranslateOptions {
    /// Rewrite `(theInt (anInt t))`/`(theList (aList t))` to `t` and drop
    /// tautological side conditions. Disable to audit the mechanical
    /// rule-by-rule output.
    pub peephole: bool,
    /// Emit the `anInt`/`aList` constructors and sort `L` even when the
    /// program uses no integers or lists.
    pub force_features: bool,
}

impl Default for TranslateOptions {
    fn default() -> Self {
        TranslateOptions {
            peephole: true,
            force_features: false,
        }
    }
}

/// A translated program: the script plus informational notes
/// (currently occurs-check warnings on equations).
#[derive(Debug, Clone)]
pub struct Translation {
    pub script: Script,
    pub notes: Vec<Diagnostic>,
}

/// Translate a single term. Purely mechanical: the peephole is applied at
/// the clause level.
pub fn translate_term(term: &Term, table: &NameTable) -> JudgementResult {
    match term {
        Term::Var(name) => JudgementResult::plain(SmtTerm::Symbol(table.variable(name).clone())),
        Term::Atom(name) => {
            JudgementResult::plain(SmtTerm::Symbol(table.constructor(name, 0).clone()))
        }
        Term::Compound(name, args) => {
            let mut conditions = Conditions::new();
            let mut translated_args = Vec::with_capacity(args.len());
            for arg in args {
                let result = translate_term(arg, table);
                conditions.extend(result.conditions);
                translated_args.push(result.translated);
            }
            JudgementResult {
                translated: SmtTerm::Apply(
                    table.constructor(name, args.len()).clone(),
                    translated_args,
                ),
                conditions,
            }
        }
        Term::IntLit(value) => JudgementResult::plain(SmtTerm::apply(
            "anInt",
            vec![SmtTerm::IntConst(value.clone())],
        )),
        Term::ArithExpr(ArithOp::Neg, operands) => match &operands[0] {
            // `-I` on a literal translates directly to `(anInt (- I))`.
            Term::IntLit(value) => JudgementResult::plain(SmtTerm::apply(
                "anInt",
                vec![SmtTerm::IntConst(-value.clone())],
            )),
            operand => {
                let inner = translate_term(operand, table);
                let mut conditions = inner.conditions;
                conditions.push(SideCondition::IsInt(inner.translated.clone()));
                JudgementResult {
                    translated: SmtTerm::apply(
                        "anInt",
                        vec![SmtTerm::apply(
                            "-",
                            vec![SmtTerm::apply("theInt", vec![inner.translated])],
                        )],
                    ),
                    conditions,
                }
            }
        },
        Term::ArithExpr(op, operands) => {
            let lhs = translate_term(&operands[0], table);
            let rhs = translate_term(&operands[1], table);
            let mut conditions = lhs.conditions;
            conditions.extend(rhs.conditions);
            conditions.push(SideCondition::IsInt(lhs.translated.clone()));
            conditions.push(SideCondition::IsInt(rhs.translated.clone()));
            let smt_op = match op {
                ArithOp::Add => "+",
                ArithOp::Sub => "-",
                ArithOp::Mul => "*",
                ArithOp::Div => "div",
                ArithOp::Mod => "mod",
                ArithOp::Neg => unreachable!("handled above"),
            };
            JudgementResult {
                translated: SmtTerm::apply(
                    "anInt",
                    vec![SmtTerm::apply(
                        smt_op,
                        vec![
                            SmtTerm::apply("theInt", vec![lhs.translated]),
                            SmtTerm::apply("theInt", vec![rhs.translated]),
                        ],
                    )],
                ),
                conditions,
            }
        }
        Term::ListTerm(elements, None) => {
            let mut conditions = Conditions::new();
            let mut translated = Vec::with_capacity(elements.len());
            for element in elements {
                let result = translate_term(element, table);
                conditions.extend(result.conditions);
                translated.push(result.translated);
            }
            let list = translated
                .into_iter()
                .rev()
                .fold(SmtTerm::sym("nil"), |acc, element| {
                    SmtTerm::apply("cons", vec![element, acc])
                });
            JudgementResult {
                translated: SmtTerm::apply("aList", vec![list]),
                conditions,
            }
        }
        Term::ListTerm(elements, Some(tail)) => {
            // `[h1,...,hn | t]` reads as `[h1 | [h2,...,hn | t]]`.
            let (first, rest) = elements.split_first().expect("partial list is nonempty");
            let head = translate_term(first, table);
            let tail_result = if rest.is_empty() {
                translate_term(tail, table)
            } else {
                translate_term(&Term::ListTerm(rest.to_vec(), Some(tail.clone())), table)
            };
            let mut conditions = head.conditions;
            conditions.extend(tail_result.conditions.clone());
            conditions.push(SideCondition::IsList(tail_result.translated.clone()));
            JudgementResult {
                translated: SmtTerm::apply(
                    "aList",
                    vec![SmtTerm::apply(
                        "cons",
                        vec![
                            head.translated,
                            SmtTerm::apply("theList", vec![tail_result.translated]),
                        ],
                    )],
                ),
                conditions,
            }
        }
    }
}

/// Translate one body item into a Boolean-sorted term.
pub fn translate_body_item(
    item: &BodyItem,
    table: &NameTable,
) -> Result<JudgementResult, TranslateError> {
    match item {
        BodyItem::Call(name, args) => {
            let mut conditions = Conditions::new();
            let mut translated_args = Vec::with_capacity(args.len());
            for arg in args {
                let result = translate_term(arg, table);
                conditions.extend(result.conditions);
                translated_args.push(result.translated);
            }
            Ok(JudgementResult {
                translated: SmtTerm::apply(
                    table.predicate(name, args.len()).clone(),
                    translated_args,
                ),
                conditions,
            })
        }
        BodyItem::Unify(lhs, rhs) => Ok(equality_judgement(lhs, rhs, table)),
        BodyItem::TermDiseq(lhs, rhs) => {
            let eq = equality_judgement(lhs, rhs, table);
            Ok(JudgementResult {
                translated: eq.translated.negate(),
                conditions: eq.conditions,
            })
        }
        // `#=` goes through the equality judgement: both sides translate
        // as terms, and an integer-valued side arrives already wrapped in
        // `anInt`.
        BodyItem::ArithConstraint(ConstraintOp::Eq, lhs, rhs) => {
            Ok(equality_judgement(lhs, rhs, table))
        }
        BodyItem::ArithConstraint(op, lhs, rhs) => {
            let l = translate_term(lhs, table);
            let r = translate_term(rhs, table);
            let mut conditions = l.conditions;
            conditions.extend(r.conditions);
            conditions.push(SideCondition::IsInt(l.translated.clone()));
            conditions.push(SideCondition::IsInt(r.translated.clone()));
            let unwrapped_l = SmtTerm::apply("theInt", vec![l.translated]);
            let unwrapped_r = SmtTerm::apply("theInt", vec![r.translated]);
            let translated = match op {
                ConstraintOp::Lt => SmtTerm::apply("<", vec![unwrapped_l, unwrapped_r]),
                ConstraintOp::Le => SmtTerm::apply("<=", vec![unwrapped_l, unwrapped_r]),
                ConstraintOp::Gt => SmtTerm::apply(">", vec![unwrapped_l, unwrapped_r]),
                ConstraintOp::Ge => SmtTerm::apply(">=", vec![unwrapped_l, unwrapped_r]),
                ConstraintOp::Ne => SmtTerm::equal(unwrapped_l, unwrapped_r).negate(),
                ConstraintOp::Eq => unreachable!("handled above"),
            };
            Ok(JudgementResult {
                translated,
                conditions,
            })
        }
        BodyItem::Negation(inner) => match inner.as_ref() {
            BodyItem::Call(name, args) => Err(TranslateError::NegatedPredicate {
                predicate: format!("{name}/{}", args.len()),
                span: None,
            }),
            BodyItem::Negation(_) => Err(TranslateError::NegatedPredicate {
                predicate: "\\+".to_string(),
                span: None,
            }),
            constraint => {
                let result = translate_body_item(constraint, table)?;
                Ok(JudgementResult {
                    translated: result.translated.negate(),
                    conditions: result.conditions,
                })
            }
        },
    }
}

fn equality_judgement(lhs: &Term, rhs: &Term, table: &NameTable) -> JudgementResult {
    let l = translate_term(lhs, table);
    let r = translate_term(rhs, table);
    let mut conditions = l.conditions;
    conditions.extend(r.conditions);
    JudgementResult {
        translated: SmtTerm::equal(l.translated, r.translated),
        conditions,
    }
}

/// Translate a full clause to its assertion.
pub fn translate_clause(
    clause: &Clause,
    table: &NameTable,
    options: TranslateOptions,
) -> Result<Command, TranslateError> {
    let result = translate_clause_inner(clause, table, options);
    result.map_err(|e| e.with_span(clause.span))
}

fn translate_clause_inner(
    clause: &Clause,
    table: &NameTable,
    options: TranslateOptions,
) -> Result<Command, TranslateError> {
    let mut antecedent: Vec<SmtTerm> = Vec::new();
    let mut conditions = Conditions::new();

    let consequent = match clause.kind() {
        ClauseKind::Fact | ClauseKind::Rule => {
            let head = clause.head.as_ref().unwrap();
            let mut translated_args = Vec::with_capacity(head.args.len());
            for arg in &head.args {
                let result = translate_term(arg, table);
                conditions.extend(result.conditions);
                translated_args.push(result.translated);
            }
            SmtTerm::apply(
                table.predicate(&head.name, head.args.len()).clone(),
                translated_args,
            )
        }
        ClauseKind::Query => SmtTerm::fals(),
    };

    for item in &clause.body {
        let result = translate_body_item(item, table)?;
        antecedent.push(result.translated);
        conditions.extend(result.conditions);
    }

    let conditions = conditions.into_vec();
    let conditions = if options.peephole {
        conditions
            .into_iter()
            .filter(|c| !c.is_tautology())
            .collect()
    } else {
        conditions
    };
    antecedent.extend(conditions.iter().map(SideCondition::to_term));

    let body = match antecedent.len() {
        0 => consequent,
        1 => SmtTerm::apply("=>", vec![antecedent.pop().unwrap(), consequent]),
        _ => SmtTerm::apply("=>", vec![SmtTerm::apply("and", antecedent), consequent]),
    };

    let mut bindings: Vec<(Sym, Sort)> = clause
        .variables()
        .into_iter()
        .map(|name| (table.variable(name).clone(), Sort::U))
        .collect();
    bindings.sort_by(|(a, _), (b, _)| a.cmp(b));

    let quantified = if bindings.is_empty() {
        body
    } else {
        SmtTerm::Forall(bindings, Box::new(body))
    };

    let final_term = if options.peephole {
        peephole(&quantified)
    } else {
        quantified
    };
    Ok(Command::Assert(final_term))
}

/// Selector/constructor cancellation: `(theInt (anInt t))` and
/// `(theList (aList t))` rewrite to `t`.
pub fn peephole(term: &SmtTerm) -> SmtTerm {
    match term {
        SmtTerm::Apply(head, args) => {
            let args: Vec<SmtTerm> = args.iter().map(peephole).collect();
            let unwraps = |outer: &str, inner: &str| -> Option<SmtTerm> {
                if head.content() != outer || args.len() != 1 {
                    return None;
                }
                match &args[0] {
                    SmtTerm::Apply(h, inner_args) if h.content() == inner => {
                        Some(inner_args[0].clone())
                    }
                    _ => None,
                }
            };
            if let Some(t) = unwraps("theInt", "anInt") {
                return t;
            }
            if let Some(t) = unwraps("theList", "aList") {
                return t;
            }
            SmtTerm::Apply(head.clone(), args)
        }
        SmtTerm::Forall(bindings, body) => {
            SmtTerm::Forall(bindings.clone(), Box::new(peephole(body)))
        }
        SmtTerm::Tester(ctor, arg) => SmtTerm::Tester(ctor.clone(), Box::new(peephole(arg))),
        other => other.clone(),
    }
}

/// The datatype block and the predicate declarations.
pub fn build_declarations(
    funcs: &[FunctionSig],
    preds: &[PredicateSig],
    feats: FeatureSet,
    table: &NameTable,
) -> Vec<Command> {
    let mut constructors = Vec::new();
    if feats.uses_integers {
        constructors.push(ConstructorDecl {
            name: "anInt".into(),
            selectors: vec![SelectorDecl {
                name: "theInt".into(),
                sort: Sort::Int,
            }],
        });
    }
    if feats.uses_lists {
        constructors.push(ConstructorDecl {
            name: "aList".into(),
            selectors: vec![SelectorDecl {
                name: "theList".into(),
                sort: Sort::L,
            }],
        });
    }
    for func in funcs {
        constructors.push(ConstructorDecl {
            name: table.constructor(&func.name, func.arity).clone(),
            selectors: (1..=func.arity)
                .map(|index| SelectorDecl {
                    name: table.selector(&func.name, func.arity, index).clone(),
                    sort: Sort::U,
                })
                .collect(),
        });
    }
    if constructors.is_empty() {
        // A datatype needs at least one constructor.
        constructors.push(ConstructorDecl::nullary("u$default"));
    }

    let mut datatypes = vec![DatatypeDecl {
        name: "U".into(),
        constructors,
    }];
    if feats.uses_lists {
        datatypes.push(DatatypeDecl {
            name: "L".into(),
            constructors: vec![
                ConstructorDecl::nullary("nil"),
                ConstructorDecl {
                    name: "cons".into(),
                    selectors: vec![
                        SelectorDecl {
                            name: "head".into(),
                            sort: Sort::U,
                        },
                        SelectorDecl {
                            name: "tail".into(),
                            sort: Sort::L,
                        },
                    ],
                },
            ],
        });
    }

    let mut commands = vec![Command::DeclareDatatypes(datatypes)];
    for pred in preds {
        commands.push(Command::DeclareFun {
            name: table.predicate(&pred.name, pred.arity).clone(),
            args: vec![Sort::U; pred.arity],
            result: Sort::Bool,
        });
    }
    commands
}

/// Translate a whole database into a script.
pub fn translate_program(db: &Database) -> Result<Translation, TranslateError> {
    translate_program_with(db, TranslateOptions::default())
}

pub fn translate_program_with(
    db: &Database,
    options: TranslateOptions,
) -> Result<Translation, TranslateError> {
    let table = NameTable::for_database(db);
    let funcs = collect_functions(db);
    let preds = collect_predicates(db);
    let mut feats = detect_features(db);
    if options.force_features {
        feats = FeatureSet::all();
    }

    let mut commands = vec![Command::SetLogic("HORN".into())];
    commands.extend(build_declarations(&funcs, &preds, feats, &table));
    let mut notes = Vec::new();
    for clause in &db.clauses {
        occurs_check_notes(clause, &mut notes);
        commands.push(translate_clause(clause, &table, options)?);
    }
    commands.push(Command::CheckSat);
    Ok(Translation {
        script: Script::new(commands),
        notes,
    })
}

/// Informational note when a variable occurs on both sides of an equation:
/// such equations are unsatisfiable over finite constructor terms, while
/// Prolog without the occurs-check would loop or build a rational tree.
fn occurs_check_notes(clause: &Clause, notes: &mut Vec<Diagnostic>) {
    fn visit(item: &BodyItem, span: Span, notes: &mut Vec<Diagnostic>) {
        match item {
            BodyItem::Unify(lhs, rhs) => {
                let is_same_var = |other: &Term, v: &str| matches!(other, Term::Var(o) if o == v);
                let offending = match (lhs, rhs) {
                    (Term::Var(v), other) if other.mentions_var(v) && !is_same_var(other, v) => {
                        Some(v)
                    }
                    (other, Term::Var(v)) if other.mentions_var(v) && !is_same_var(other, v) => {
                        Some(v)
                    }
                    _ => None,
                };
                if let Some(v) = offending {
                    notes.push(Diagnostic::note(
                        span,
                        format!(
                            "variable {v} occurs on both sides of `=`; the equation is \
                             unsatisfiable over finite terms"
                        ),
                    ));
                }
            }
            BodyItem::Negation(inner) => visit(inner, span, notes),
            _ => {}
        }
    }
    for item in &clause.body {
        visit(item, clause.span, notes);
    }
}
