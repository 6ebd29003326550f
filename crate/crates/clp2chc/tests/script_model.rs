//! Semantic check of the translation on tiny programs via a third route:
//! the emitted script is re-parsed and interpreted directly — ground
//! constructor values are enumerated from the script's own datatype
//! declarations, clause instances are evaluated with SMT-LIB integer and
//! selector semantics, and the least model is computed. The verdict
//! ("some query clause fires" versus "none does at fixpoint") must match
//! the bounded evaluator's verdict on the original program.
//!
//! Selector applications to the wrong constructor evaluate to
//! "undefined"; an instance only fires when its antecedent is definitely
//! true, which is faithful because every emitted selector use is guarded
//! by a tester assumption in the same antecedent.

use std::collections::{HashMap, HashSet};

use num_bigint::BigInt;
use num_traits::Zero;

use clp2chc::oracle::{fixpoint, query_on, Bounds};
use clp2chc::smtlib::{emit, parse_script, Command, Script, SmtTerm, Sort, Style};
use clp2chc::syntax::parse_program;
use clp2chc::translator::translate_program;

// ---------------------------------------------------------------------
// Ground values
// ---------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum UVal {
    Ctor(String, Vec<UVal>),
    AnInt(BigInt),
    AList(Vec<UVal>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Value {
    U(UVal),
    L(Vec<UVal>),
    Int(BigInt),
    Bool(bool),
}

struct Declarations {
    /// Constructor name -> (argument sorts, owning datatype sort).
    constructors: HashMap<String, (Vec<Sort>, Sort)>,
    /// selector name -> (constructor, 0-based index, result sort).
    selectors: HashMap<String, (String, usize, Sort)>,
    predicates: HashMap<String, usize>,
}

fn collect_declarations(script: &Script) -> Declarations {
    let mut declarations = Declarations {
        constructors: HashMap::new(),
        selectors: HashMap::new(),
        predicates: HashMap::new(),
    };
    for command in &script.commands {
        match command {
            Command::DeclareDatatypes(datatypes) => {
                for datatype in datatypes {
                    let owner = Sort::from_name(datatype.name.content()).unwrap();
                    for ctor in &datatype.constructors {
                        let args: Vec<Sort> = ctor.selectors.iter().map(|s| s.sort).collect();
                        for (index, selector) in ctor.selectors.iter().enumerate() {
                            declarations.selectors.insert(
                                selector.name.content().to_string(),
                                (ctor.name.content().to_string(), index, selector.sort),
                            );
                        }
                        declarations
                            .constructors
                            .insert(ctor.name.content().to_string(), (args, owner));
                    }
                }
            }
            Command::DeclareFun { name, args, .. } => {
                declarations
                    .predicates
                    .insert(name.content().to_string(), args.len());
            }
            _ => {}
        }
    }
    declarations
}

/// All U values up to the depth bound, built from the script's own
/// constructor alphabet.
fn enumerate_u_values(
    declarations: &Declarations,
    depth: u32,
    ints: (i64, i64),
    max_list: usize,
) -> Vec<UVal> {
    let mut values: Vec<UVal> = Vec::new();
    for level in 1..=depth {
        let pool = values.clone();
        let mut fresh = Vec::new();
        for (name, args) in sorted(&declarations.constructors) {
            match name.as_str() {
                "anInt" if level == 1 => {
                    for k in ints.0..=ints.1 {
                        fresh.push(UVal::AnInt(BigInt::from(k)));
                    }
                }
                "aList" => {
                    // Lists of strictly shallower values; a list node
                    // adds one depth level.
                    for len in 0..=max_list {
                        tuples(&pool, len, &mut |tuple| {
                            let candidate = UVal::AList(tuple.to_vec());
                            if u_depth(&candidate) == level {
                                fresh.push(candidate);
                            }
                        });
                    }
                }
                "anInt" => {}
                _ => {
                    if args.is_empty() {
                        if level == 1 {
                            fresh.push(UVal::Ctor(name.clone(), Vec::new()));
                        }
                    } else {
                        assert!(
                            args.iter().all(|s| *s == Sort::U),
                            "user constructors take U arguments"
                        );
                        tuples(&pool, args.len(), &mut |tuple| {
                            let candidate = UVal::Ctor(name.clone(), tuple.to_vec());
                            if u_depth(&candidate) == level {
                                fresh.push(candidate);
                            }
                        });
                    }
                }
            }
        }
        values.extend(fresh);
        assert!(values.len() < 100_000, "universe too large for this test");
    }
    values
}

fn sorted(map: &HashMap<String, (Vec<Sort>, Sort)>) -> Vec<(String, Vec<Sort>)> {
    let mut entries: Vec<_> = map
        .iter()
        .filter(|(_, (_, owner))| *owner == Sort::U)
        .map(|(k, (args, _))| (k.clone(), args.clone()))
        .collect();
    entries.sort_by(|(a, _), (b, _)| a.cmp(b));
    entries
}

fn tuples(pool: &[UVal], len: usize, emit: &mut impl FnMut(&[UVal])) {
    fn rec(pool: &[UVal], tuple: &mut Vec<UVal>, len: usize, emit: &mut impl FnMut(&[UVal])) {
        if tuple.len() == len {
            emit(tuple);
            return;
        }
        for value in pool {
            tuple.push(value.clone());
            rec(pool, tuple, len, emit);
            tuple.pop();
        }
    }
    rec(pool, &mut Vec::new(), len, emit);
}

fn u_depth(value: &UVal) -> u32 {
    match value {
        UVal::AnInt(_) => 1,
        UVal::Ctor(_, args) => 1 + args.iter().map(u_depth).max().unwrap_or(0),
        UVal::AList(items) => 1 + items.iter().map(u_depth).max().unwrap_or(0),
    }
}

// ---------------------------------------------------------------------
// Term evaluation (three-valued: None = undefined)
// ---------------------------------------------------------------------

struct Interp<'a> {
    declarations: &'a Declarations,
    facts: &'a HashSet<(String, Vec<UVal>)>,
    env: HashMap<String, UVal>,
}

impl Interp<'_> {
    fn eval(&self, term: &SmtTerm) -> Option<Value> {
        match term {
            SmtTerm::IntConst(value) => Some(Value::Int(value.clone())),
            SmtTerm::Symbol(sym) => {
                let name = sym.content();
                if let Some(value) = self.env.get(name) {
                    return Some(Value::U(value.clone()));
                }
                match name {
                    "true" => return Some(Value::Bool(true)),
                    "false" => return Some(Value::Bool(false)),
                    "nil" => return Some(Value::L(Vec::new())),
                    _ => {}
                }
                if let Some((args, owner)) = self.declarations.constructors.get(name) {
                    assert!(args.is_empty() && *owner == Sort::U);
                    return Some(Value::U(UVal::Ctor(name.to_string(), Vec::new())));
                }
                if self.declarations.predicates.get(name) == Some(&0) {
                    return Some(Value::Bool(
                        self.facts.contains(&(name.to_string(), Vec::new())),
                    ));
                }
                panic!("unknown symbol {name}");
            }
            SmtTerm::Tester(ctor, arg) => {
                let value = self.eval(arg)?;
                let Value::U(value) = value else {
                    panic!("tester over non-U value");
                };
                let matches = match (&value, ctor.content()) {
                    (UVal::AnInt(_), "anInt") => true,
                    (UVal::AList(_), "aList") => true,
                    (UVal::Ctor(name, _), wanted) => name == wanted,
                    _ => false,
                };
                Some(Value::Bool(matches))
            }
            SmtTerm::Forall(..) => panic!("nested quantifier"),
            SmtTerm::Apply(head, args) => self.eval_apply(head.content(), args),
        }
    }

    fn eval_apply(&self, head: &str, args: &[SmtTerm]) -> Option<Value> {
        match head {
            "and" | "or" => {
                let mut saw_undefined = false;
                let shortcut = head == "or";
                for arg in args {
                    match self.eval(arg) {
                        Some(Value::Bool(b)) if b == shortcut => {
                            return Some(Value::Bool(shortcut))
                        }
                        Some(Value::Bool(_)) => {}
                        None => saw_undefined = true,
                        Some(_) => panic!("non-Bool connective argument"),
                    }
                }
                if saw_undefined {
                    None
                } else {
                    Some(Value::Bool(!shortcut))
                }
            }
            "not" => match self.eval(&args[0])? {
                Value::Bool(b) => Some(Value::Bool(!b)),
                _ => panic!("non-Bool not"),
            },
            "=" => {
                let lhs = self.eval(&args[0])?;
                let rhs = self.eval(&args[1])?;
                Some(Value::Bool(lhs == rhs))
            }
            "+" | "-" | "*" | "div" | "mod" => {
                if head == "-" && args.len() == 1 {
                    let Value::Int(v) = self.eval(&args[0])? else {
                        panic!("non-Int minus")
                    };
                    return Some(Value::Int(-v));
                }
                let (Value::Int(a), Value::Int(b)) =
                    (self.eval(&args[0])?, self.eval(&args[1])?)
                else {
                    panic!("non-Int arithmetic")
                };
                let result = match head {
                    "+" => a + b,
                    "-" => a - b,
                    "*" => a * b,
                    _ => {
                        if b.is_zero() {
                            return None;
                        }
                        // Euclidean division and remainder.
                        let mut q = &a / &b;
                        let mut r = &a - &b * &q;
                        if r < BigInt::zero() {
                            if b > BigInt::zero() {
                                q -= 1;
                                r += &b;
                            } else {
                                q += 1;
                                r -= &b;
                            }
                        }
                        if head == "div" {
                            q
                        } else {
                            r
                        }
                    }
                };
                Some(Value::Int(result))
            }
            "<" | "<=" | ">" | ">=" => {
                let (Value::Int(a), Value::Int(b)) =
                    (self.eval(&args[0])?, self.eval(&args[1])?)
                else {
                    panic!("non-Int comparison")
                };
                Some(Value::Bool(match head {
                    "<" => a < b,
                    "<=" => a <= b,
                    ">" => a > b,
                    _ => a >= b,
                }))
            }
            "cons" => {
                let Value::U(item) = self.eval(&args[0])? else {
                    panic!("cons head must be U")
                };
                let Value::L(mut rest) = self.eval(&args[1])? else {
                    panic!("cons tail must be L")
                };
                rest.insert(0, item);
                Some(Value::L(rest))
            }
            "head" => match self.eval(&args[0])? {
                Value::L(items) => items.first().cloned().map(Value::U),
                _ => panic!("head over non-L"),
            },
            "tail" => match self.eval(&args[0])? {
                Value::L(items) if !items.is_empty() => Some(Value::L(items[1..].to_vec())),
                Value::L(_) => None,
                _ => panic!("tail over non-L"),
            },
            _ => {
                if let Some((ctor_of, index, sort)) = self.declarations.selectors.get(head) {
                    let Value::U(value) = self.eval(&args[0])? else {
                        panic!("selector over non-U")
                    };
                    return match (&value, ctor_of.as_str()) {
                        (UVal::AnInt(v), "anInt") => Some(Value::Int(v.clone())),
                        (UVal::AList(items), "aList") => Some(Value::L(items.clone())),
                        (UVal::Ctor(name, ctor_args), wanted) if name == wanted => {
                            assert_eq!(*sort, Sort::U);
                            Some(Value::U(ctor_args[*index].clone()))
                        }
                        // Selector applied to the wrong constructor.
                        _ => None,
                    };
                }
                if let Some((ctor_args, _)) = self.declarations.constructors.get(head) {
                    let values = args
                        .iter()
                        .map(|a| self.eval(a))
                        .collect::<Option<Vec<_>>>()?;
                    return Some(Value::U(match head {
                        "anInt" => {
                            let [Value::Int(v)] = values.as_slice() else {
                                panic!("anInt expects an Int")
                            };
                            UVal::AnInt(v.clone())
                        }
                        "aList" => {
                            let [Value::L(items)] = values.as_slice() else {
                                panic!("aList expects an L")
                            };
                            UVal::AList(items.clone())
                        }
                        _ => {
                            assert_eq!(ctor_args.len(), values.len());
                            UVal::Ctor(
                                head.to_string(),
                                values
                                    .into_iter()
                                    .map(|v| match v {
                                        Value::U(u) => u,
                                        _ => panic!("constructor argument must be U"),
                                    })
                                    .collect(),
                            )
                        }
                    }));
                }
                if let Some(arity) = self.declarations.predicates.get(head) {
                    assert_eq!(*arity, args.len());
                    let values = args
                        .iter()
                        .map(|a| match self.eval(a) {
                            Some(Value::U(u)) => Some(u),
                            Some(_) => panic!("predicate argument must be U"),
                            None => None,
                        })
                        .collect::<Option<Vec<_>>>()?;
                    return Some(Value::Bool(
                        self.facts.contains(&(head.to_string(), values)),
                    ));
                }
                panic!("unknown application head {head}");
            }
        }
    }
}

// ---------------------------------------------------------------------
// Least model of the script
// ---------------------------------------------------------------------

struct ClauseShape {
    bindings: Vec<String>,
    antecedent: Vec<SmtTerm>,
    /// None encodes `false` (a query clause).
    consequent: Option<SmtTerm>,
}

fn clause_shapes(script: &Script) -> Vec<ClauseShape> {
    script
        .asserts()
        .map(|assert| {
            let (bindings, body) = match assert {
                SmtTerm::Forall(bindings, body) => (
                    bindings
                        .iter()
                        .map(|(name, sort)| {
                            assert_eq!(*sort, Sort::U, "clause variables are U-sorted");
                            name.content().to_string()
                        })
                        .collect(),
                    body.as_ref(),
                ),
                other => (Vec::new(), other),
            };
            match body {
                SmtTerm::Apply(head, args) if head.content() == "=>" => {
                    let antecedent = match &args[0] {
                        SmtTerm::Apply(h, conjuncts) if h.content() == "and" => {
                            conjuncts.clone()
                        }
                        single => vec![single.clone()],
                    };
                    let consequent = match &args[1] {
                        SmtTerm::Symbol(s) if s.content() == "false" => None,
                        other => Some(other.clone()),
                    };
                    ClauseShape {
                        bindings,
                        antecedent,
                        consequent,
                    }
                }
                other => ClauseShape {
                    bindings,
                    antecedent: Vec::new(),
                    consequent: Some(other.clone()),
                },
            }
        })
        .collect()
}

/// Interpret the script: fixpoint of the non-query clauses over the
/// bounded value universe, then check whether any query clause fires.
fn script_derives_contradiction(
    script: &Script,
    depth: u32,
    ints: (i64, i64),
    max_list: usize,
) -> bool {
    let declarations = collect_declarations(script);
    let universe = enumerate_u_values(&declarations, depth, ints, max_list);
    let shapes = clause_shapes(script);

    let mut facts: HashSet<(String, Vec<UVal>)> = HashSet::new();
    loop {
        let mut added = false;
        for shape in shapes.iter().filter(|s| s.consequent.is_some()) {
            for_each_env(&shape.bindings, &universe, &mut |env| {
                let interp = Interp {
                    declarations: &declarations,
                    facts: &facts,
                    env,
                };
                let fires = shape
                    .antecedent
                    .iter()
                    .all(|c| interp.eval(c) == Some(Value::Bool(true)));
                if !fires {
                    return;
                }
                let consequent = shape.consequent.as_ref().unwrap();
                let (name, args) = match consequent {
                    SmtTerm::Symbol(sym) => (sym.content().to_string(), Vec::new()),
                    SmtTerm::Apply(head, args) => {
                        let values = args
                            .iter()
                            .map(|a| match interp.eval(a) {
                                Some(Value::U(u)) => Some(u),
                                _ => None,
                            })
                            .collect::<Option<Vec<_>>>();
                        match values {
                            Some(values) => (head.content().to_string(), values),
                            None => return,
                        }
                    }
                    _ => panic!("malformed consequent"),
                };
                if !facts.contains(&(name.clone(), args.clone())) {
                    facts.insert((name, args));
                    added = true;
                }
            });
        }
        if !added {
            break;
        }
    }

    let mut contradiction = false;
    for shape in shapes.iter().filter(|s| s.consequent.is_none()) {
        for_each_env(&shape.bindings, &universe, &mut |env| {
            let interp = Interp {
                declarations: &declarations,
                facts: &facts,
                env,
            };
            if shape
                .antecedent
                .iter()
                .all(|c| interp.eval(c) == Some(Value::Bool(true)))
            {
                contradiction = true;
            }
        });
    }
    contradiction
}

fn for_each_env(
    bindings: &[String],
    universe: &[UVal],
    body: &mut impl FnMut(HashMap<String, UVal>),
) {
    fn rec(
        bindings: &[String],
        universe: &[UVal],
        env: &mut HashMap<String, UVal>,
        body: &mut impl FnMut(HashMap<String, UVal>),
    ) {
        match bindings.split_first() {
            None => body(env.clone()),
            Some((first, rest)) => {
                for value in universe {
                    env.insert(first.clone(), value.clone());
                    rec(rest, universe, env, body);
                }
                env.remove(bindings.first().unwrap());
            }
        }
    }
    rec(bindings, universe, &mut HashMap::new(), body);
}

// ---------------------------------------------------------------------
// The agreement check
// ---------------------------------------------------------------------

/// Translate the program, interpret the emitted script, run the bounded
/// evaluator on the source, and require the same verdict from both.
fn assert_routes_agree(source: &str, depth: u32, ints: (i64, i64), max_list: usize) {
    let db = parse_program(source).unwrap().database;
    let script = translate_program(&db).unwrap().script;
    // Go through text so the interpreter sees exactly what solvers see.
    let reparsed = parse_script(&emit(&script, Style::Modern)).unwrap();
    let script_verdict = script_derives_contradiction(&reparsed, depth, ints, max_list);

    let bounds = Bounds::new(depth, ints.0, ints.1, max_list, 100);
    let facts = fixpoint(&db, &bounds).unwrap();
    assert!(facts.is_saturated(), "oracle did not saturate:\n{source}");
    let oracle_verdict = db
        .queries()
        .any(|query| query_on(&facts, query).unwrap().derivable);

    assert_eq!(
        script_verdict, oracle_verdict,
        "script interpretation and bounded evaluator disagree on:\n{source}"
    );
}

#[test]
fn ground_fact_queries() {
    assert_routes_agree("man(father(claire)).\n?- man(father(claire)).", 2, (0, 0), 0);
    assert_routes_agree("man(tom).\n?- man(sue).", 1, (0, 0), 0);
}

#[test]
fn rule_with_two_body_atoms() {
    assert_routes_agree(
        "likes(a, b). likes(b, a). likes(a, c).\n\
         friends(X, Y) :- likes(X, Y), likes(Y, X).\n\
         ?- friends(a, b).",
        1,
        (0, 0),
        0,
    );
    assert_routes_agree(
        "likes(a, b). likes(b, a). likes(a, c).\n\
         friends(X, Y) :- likes(X, Y), likes(Y, X).\n\
         ?- friends(a, c).",
        1,
        (0, 0),
        0,
    );
}

#[test]
fn list_guards_and_selectors() {
    assert_routes_agree(
        "p([a]).\nq(X) :- p([X|T]), T = [].\n?- q(a).",
        2,
        (0, 0),
        1,
    );
    assert_routes_agree(
        "p([a, a]).\nq(X) :- p([X|T]), T = [].\n?- q(a).",
        3,
        (0, 0),
        2,
    );
}

#[test]
fn integer_guards_and_equations() {
    assert_routes_agree(
        "num(3).\nbig(X) :- num(X), X #> 2.\n?- big(3).",
        1,
        (0, 5),
        0,
    );
    assert_routes_agree(
        "num(3).\ndouble(Y) :- num(X), Y #= X + 2.\n?- double(5).",
        1,
        (0, 5),
        0,
    );
    assert_routes_agree(
        "num(3).\nbig(X) :- num(X), X #> 5.\n?- big(X).",
        1,
        (0, 6),
        0,
    );
}

#[test]
fn disequality_and_negation() {
    assert_routes_agree(
        "p(a). p(b).\nd(X, Y) :- p(X), p(Y), X =\\= Y.\n?- d(a, b).",
        1,
        (0, 0),
        0,
    );
    assert_routes_agree(
        "p(a). p(b).\ns(X) :- p(X), \\+ X = a.\n?- s(b).",
        1,
        (0, 0),
        0,
    );
    assert_routes_agree(
        "p(a).\ns(X) :- p(X), \\+ X = a.\n?- s(X).",
        1,
        (0, 0),
        0,
    );
}

#[test]
fn ill_typed_arithmetic_stays_vacuous() {
    // X ranges over atoms; the IsInt guard must keep the rule silent on
    // both routes.
    assert_routes_agree(
        "p(a). p(3).\nbump(Y) :- p(X), Y #= X + 1.\n?- bump(4).",
        1,
        (0, 5),
        0,
    );
    assert_routes_agree(
        "p(a).\nbump(Y) :- p(X), Y #= X + 1.\n?- bump(Y).",
        1,
        (0, 5),
        0,
    );
}

#[test]
fn nonground_fact_schemes() {
    assert_routes_agree(
        "p(X).\nq(X) :- p(X), r(X).\nr(a).\n?- q(a).",
        1,
        (0, 0),
        0,
    );
    assert_routes_agree("p(f(X)).\n?- p(f(a)).", 2, (0, 0), 0);
    assert_routes_agree("p(f(X)).\n?- p(a).", 2, (0, 0), 0);
}

#[test]
fn peephole_off_is_equisatisfiable() {
    // The mechanical (non-peephole) output interprets the same.
    use clp2chc::translator::{translate_program_with, TranslateOptions};
    let source = "num(3).\nbig(X) :- num(X), X #> 2.\n?- big(3).";
    let db = parse_program(source).unwrap().database;
    let options = TranslateOptions {
        peephole: false,
        ..TranslateOptions::default()
    };
    let script = translate_program_with(&db, options).unwrap().script;
    let reparsed = parse_script(&emit(&script, Style::Modern)).unwrap();
    assert!(script_derives_contradiction(&reparsed, 1, (0, 5), 0));
}

// ---------------------------------------------------------------------
// Generative agreement
// ---------------------------------------------------------------------

mod generative {
    use super::*;
    use clp2chc::syntax::{ArithOp, BodyItem, Clause, ConstraintOp, Database, Term};
    use proptest::prelude::*;

    // Tiny alphabets keep both routes' value universes around a dozen
    // terms, so clause instantiation stays cheap.
    fn tiny_term() -> impl Strategy<Value = Term> {
        let leaf = prop_oneof![
            3 => prop_oneof![Just(Term::var("X")), Just(Term::var("Y")), Just(Term::var("Z"))],
            3 => prop_oneof![Just(Term::atom("a")), Just(Term::atom("b"))],
            2 => (0u64..3).prop_map(Term::int),
            1 => Just(Term::nil()),
        ];
        leaf.prop_recursive(2, 6, 2, |inner| {
            prop_oneof![
                prop::collection::vec(inner.clone(), 1..2).prop_map(Term::list),
                (inner.clone(), inner.clone()).prop_map(|(element, tail)| {
                    Term::list_with_tail(vec![element], tail)
                }),
                (
                    prop_oneof![Just(ArithOp::Add), Just(ArithOp::Sub), Just(ArithOp::Mul)],
                    inner.clone(),
                    inner
                )
                    .prop_map(|(op, lhs, rhs)| Term::ArithExpr(op, vec![lhs, rhs])),
            ]
        })
    }

    fn tiny_item() -> impl Strategy<Value = BodyItem> {
        prop_oneof![
            4 => ("[pq]", prop::collection::vec(tiny_term(), 1..3))
                .prop_map(|(name, args)| BodyItem::Call(name, args)),
            2 => (tiny_term(), tiny_term()).prop_map(|(l, r)| BodyItem::Unify(l, r)),
            1 => (tiny_term(), tiny_term()).prop_map(|(l, r)| BodyItem::TermDiseq(l, r)),
            2 => (
                prop_oneof![
                    Just(ConstraintOp::Eq),
                    Just(ConstraintOp::Lt),
                    Just(ConstraintOp::Ge),
                    Just(ConstraintOp::Ne),
                ],
                tiny_term(),
                tiny_term()
            )
                .prop_map(|(op, l, r)| BodyItem::ArithConstraint(op, l, r)),
        ]
    }

    fn tiny_program() -> impl Strategy<Value = Database> {
        (
            prop::collection::vec(
                ("[pq]", prop::collection::vec(tiny_term(), 1..3)),
                1..3,
            ),
            prop::collection::vec(
                (
                    "[pq]",
                    prop::collection::vec(tiny_term(), 1..3),
                    prop::collection::vec(tiny_item(), 1..3),
                ),
                0..3,
            ),
            prop::collection::vec(tiny_item(), 1..2),
        )
            .prop_map(|(facts, rules, query)| {
                let mut clauses: Vec<Clause> = facts
                    .into_iter()
                    .map(|(name, args)| Clause::fact(name, args))
                    .collect();
                clauses.extend(
                    rules
                        .into_iter()
                        .map(|(name, args, body)| Clause::rule(name, args, body)),
                );
                clauses.push(Clause::query(query));
                Database::new(clauses)
            })
    }

    /// Division is excluded from the generator: SMT-LIB leaves division
    /// by zero solver-chosen, where both of our routes treat the
    /// instance as silent.
    fn routes_agree(db: &Database) -> Result<(), TestCaseError> {
        let depth = 2;
        let ints = (0i64, 3i64);
        let max_list = 1;

        let script = translate_program(db).unwrap().script;
        let reparsed = parse_script(&emit(&script, Style::Modern)).unwrap();
        let script_verdict = script_derives_contradiction(&reparsed, depth, ints, max_list);

        let bounds = Bounds::new(depth, ints.0, ints.1, max_list, 200);
        let facts = fixpoint(db, &bounds).unwrap();
        prop_assert!(facts.is_saturated());
        let oracle_verdict = db
            .queries()
            .any(|query| query_on(&facts, query).unwrap().derivable);

        prop_assert_eq!(
            script_verdict,
            oracle_verdict,
            "routes disagree on:\n{}",
            clp2chc::syntax::print_program(db)
        );
        Ok(())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(150))]

        #[test]
        fn random_tiny_programs_agree(db in tiny_program()) {
            routes_agree(&db)?;
        }
    }
}
