//! Saturation soundness of the join-based fixpoint against a naive
//! full-instantiation reference on tiny programs.
//!
//! The reference enumerates the bounded universe, instantiates every
//! clause with every tuple of universe terms, evaluates the ground body
//! with its own term-normalization and arithmetic, and iterates to a
//! fixpoint. It deliberately shares no code with the evaluator under
//! test beyond the universe enumeration and the AST.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::Zero;

use clp2chc::oracle::{enumerate_universe, fixpoint, Bounds};
use clp2chc::signatures::{collect_functions, detect_features};
use clp2chc::syntax::{parse_program, ArithOp, BodyItem, ConstraintOp, Database, Term};

type Fact = (String, Vec<Term>);

/// Ground normal form: arithmetic folded, list tails spliced. `None` when
/// the term is ill-typed (non-integer operand, improper tail, zero
/// divisor).
fn norm(term: &Term) -> Option<Term> {
    match term {
        Term::Var(_) => panic!("reference evaluates ground terms only"),
        Term::Atom(_) | Term::IntLit(_) => Some(term.clone()),
        Term::Compound(name, args) => {
            let args = args.iter().map(norm).collect::<Option<Vec<_>>>()?;
            Some(Term::Compound(name.clone(), args))
        }
        Term::ArithExpr(op, args) => {
            let values = args
                .iter()
                .map(|a| match norm(a)? {
                    Term::IntLit(v) => Some(v),
                    _ => None,
                })
                .collect::<Option<Vec<BigInt>>>()?;
            let result = match (op, values.as_slice()) {
                (ArithOp::Neg, [v]) => -v,
                (ArithOp::Add, [a, b]) => a + b,
                (ArithOp::Sub, [a, b]) => a - b,
                (ArithOp::Mul, [a, b]) => a * b,
                (ArithOp::Div, [a, b]) => euclid(a, b)?.0,
                (ArithOp::Mod, [a, b]) => euclid(a, b)?.1,
                _ => return None,
            };
            Some(Term::IntLit(result))
        }
        Term::ListTerm(elements, tail) => {
            let mut items = elements.iter().map(norm).collect::<Option<Vec<_>>>()?;
            if let Some(tail) = tail {
                match norm(tail)? {
                    Term::ListTerm(rest, None) => items.extend(rest),
                    _ => return None,
                }
            }
            Some(Term::ListTerm(items, None))
        }
    }
}

fn euclid(a: &BigInt, b: &BigInt) -> Option<(BigInt, BigInt)> {
    if b.is_zero() {
        return None;
    }
    // q = floor or ceil so that 0 <= r < |b|.
    let mut q = a / b;
    let mut r = a - b * &q;
    if r < BigInt::zero() {
        if b > &BigInt::zero() {
            q -= 1;
            r += b;
        } else {
            q += 1;
            r -= b;
        }
    }
    Some((q, r))
}

fn subst_term(term: &Term, vars: &[&str], values: &[Term]) -> Term {
    match term {
        Term::Var(name) => {
            let index = vars.iter().position(|v| v == name).expect("clause var");
            values[index].clone()
        }
        Term::Atom(_) | Term::IntLit(_) => term.clone(),
        Term::Compound(name, args) => Term::Compound(
            name.clone(),
            args.iter().map(|a| subst_term(a, vars, values)).collect(),
        ),
        Term::ArithExpr(op, args) => Term::ArithExpr(
            *op,
            args.iter().map(|a| subst_term(a, vars, values)).collect(),
        ),
        Term::ListTerm(elements, tail) => Term::ListTerm(
            elements
                .iter()
                .map(|e| subst_term(e, vars, values))
                .collect(),
            tail.as_deref()
                .map(|t| Box::new(subst_term(t, vars, values))),
        ),
    }
}

/// Truth of a ground body item; `None` encodes an ill-typed instance,
/// which never holds.
fn item_holds(item: &BodyItem, vars: &[&str], values: &[Term], facts: &HashSet<Fact>) -> bool {
    fn eval(
        item: &BodyItem,
        vars: &[&str],
        values: &[Term],
        facts: &HashSet<Fact>,
    ) -> Option<bool> {
        match item {
            BodyItem::Call(name, args) => {
                let args = args
                    .iter()
                    .map(|a| norm(&subst_term(a, vars, values)))
                    .collect::<Option<Vec<_>>>()?;
                Some(facts.contains(&(name.clone(), args)))
            }
            BodyItem::Unify(lhs, rhs) | BodyItem::ArithConstraint(ConstraintOp::Eq, lhs, rhs) => {
                let l = norm(&subst_term(lhs, vars, values))?;
                let r = norm(&subst_term(rhs, vars, values))?;
                Some(l == r)
            }
            BodyItem::TermDiseq(lhs, rhs) => {
                let l = norm(&subst_term(lhs, vars, values))?;
                let r = norm(&subst_term(rhs, vars, values))?;
                Some(l != r)
            }
            BodyItem::ArithConstraint(op, lhs, rhs) => {
                let l = norm(&subst_term(lhs, vars, values))?;
                let r = norm(&subst_term(rhs, vars, values))?;
                let (Term::IntLit(a), Term::IntLit(b)) = (l, r) else {
                    return None;
                };
                Some(match op {
                    ConstraintOp::Lt => a < b,
                    ConstraintOp::Le => a <= b,
                    ConstraintOp::Gt => a > b,
                    ConstraintOp::Ge => a >= b,
                    ConstraintOp::Ne => a != b,
                    ConstraintOp::Eq => unreachable!(),
                })
            }
            BodyItem::Negation(inner) => Some(!eval(inner, vars, values, facts)?),
        }
    }
    eval(item, vars, values, facts).unwrap_or(false)
}

fn depth_of(term: &Term) -> u32 {
    match term {
        Term::Atom(_) | Term::IntLit(_) => 1,
        Term::Compound(_, args) => 1 + args.iter().map(depth_of).max().unwrap(),
        Term::ListTerm(elements, None) => 1 + elements.iter().map(depth_of).max().unwrap_or(0),
        _ => panic!("reference facts are ground and normalized"),
    }
}

fn fact_within(args: &[Term], bounds: &Bounds) -> bool {
    fn check(term: &Term, bounds: &Bounds) -> bool {
        match term {
            Term::IntLit(v) => bounds.contains_int(v),
            Term::Atom(_) => true,
            Term::Compound(_, args) => args.iter().all(|a| check(a, bounds)),
            Term::ListTerm(elements, None) => {
                elements.len() <= bounds.max_list_len && elements.iter().all(|e| check(e, bounds))
            }
            _ => false,
        }
    }
    args.iter()
        .all(|a| depth_of(a) <= bounds.term_depth && check(a, bounds))
}

/// Naive reference: full instantiation over the universe, iterated until
/// nothing new appears.
fn naive_fixpoint(db: &Database, bounds: &Bounds) -> HashSet<Fact> {
    let universe = enumerate_universe(&collect_functions(db), detect_features(db), bounds).unwrap();
    assert!(universe.len() <= 50, "reference is for tiny programs");

    let mut facts: HashSet<Fact> = HashSet::new();
    loop {
        let mut added = false;
        for clause in db.definitions() {
            let head = clause.head.as_ref().unwrap();
            let vars = clause.variables();
            let mut assignment = vec![0usize; vars.len()];
            loop {
                let values: Vec<Term> = assignment.iter().map(|&i| universe[i].clone()).collect();
                let body_holds = clause
                    .body
                    .iter()
                    .all(|item| item_holds(item, &vars, &values, &facts));
                if body_holds {
                    let args = head
                        .args
                        .iter()
                        .map(|a| norm(&subst_term(a, &vars, &values)))
                        .collect::<Option<Vec<_>>>();
                    if let Some(args) = args {
                        if fact_within(&args, bounds) && facts.insert((head.name.clone(), args)) {
                            added = true;
                        }
                    }
                }
                // Advance the assignment odometer.
                let mut position = 0;
                loop {
                    if position == assignment.len() {
                        break;
                    }
                    assignment[position] += 1;
                    if assignment[position] < universe.len() {
                        break;
                    }
                    assignment[position] = 0;
                    position += 1;
                }
                if position == assignment.len() {
                    break;
                }
            }
        }
        if !added {
            return facts;
        }
    }
}

fn assert_matches_reference(source: &str, bounds: &Bounds) {
    let db = parse_program(source).unwrap().database;
    let reference = naive_fixpoint(&db, bounds);
    let joined = fixpoint(&db, bounds).unwrap();
    assert!(
        joined.is_saturated(),
        "join-based fixpoint did not saturate"
    );

    for (name, args) in &reference {
        assert!(
            joined.holds(name, args),
            "reference fact missing from evaluator: {name}{args:?}"
        );
    }
    for (key, args) in joined.iter() {
        assert!(
            reference.contains(&(key.0.clone(), args.clone())),
            "evaluator derived a fact the reference does not: {key:?}{args:?}"
        );
    }
}

#[test]
fn family_program() {
    assert_matches_reference(
        "parent(adam, bob). parent(bob, cyrus).\n\
         ancestor(X, Y) :- parent(X, Y).\n\
         ancestor(X, Z) :- parent(X, Y), ancestor(Y, Z).",
        &Bounds::new(1, 0, 0, 0, 50),
    );
}

#[test]
fn scheme_instantiation_matches() {
    // p(X) is a non-ground fact; q copies it through a rule.
    assert_matches_reference(
        "base(a). base(f(a)).\np(X).\nq(X) :- p(X), base(X).\nr(X) :- p(X).",
        &Bounds::new(2, 0, 0, 0, 50),
    );
}

#[test]
fn arithmetic_guards_match() {
    assert_matches_reference(
        "num(0). num(1). num(2). num(3).\n\
         small(X) :- num(X), X #< 2.\n\
         double(X, Y) :- num(X), Y #= X * 2.\n\
         odd(X) :- num(X), X mod 2 #= 1.",
        &Bounds::new(1, 0, 6, 0, 50),
    );
}

#[test]
fn list_program_matches() {
    assert_matches_reference(
        "elem(a).\nsingleton([a]).\nwrap(X, [X]) :- elem(X).\nfirst(X) :- singleton([X|T]), T = [].",
        &Bounds::new(2, 0, 0, 1, 50),
    );
}

#[test]
fn negation_and_disequality_match() {
    assert_matches_reference(
        "p(a). p(b).\nq(X) :- p(X), X =\\= a.\nr(X) :- p(X), \\+ X = b.",
        &Bounds::new(1, 0, 0, 0, 50),
    );
}

#[test]
fn ill_typed_arithmetic_matches() {
    assert_matches_reference(
        "val(a). val(3).\nbump(X, Y) :- val(X), Y #= X + 1.",
        &Bounds::new(1, 0, 5, 0, 50),
    );
}
