//! Bottom-up evaluation: semi-naive fixpoint and bounded query answering.
//!
//! Derived facts are ground and kept per predicate in insertion order.
//! Non-ground facts (such as `path(A, A, 0, [waypoint(A, 0)])`) are kept
//! as schemes and consulted during matching by unification, so the
//! evaluator never has to materialize their instances. Variables that
//! remain unbound after joining and constraint propagation are enumerated
//! over the bounded universe: integer-constrained variables over the
//! integer range, everything else over [`enumerate_universe`], subject to
//! the universe cap.
//!
//! Arithmetic follows SMT-LIB integer semantics (Euclidean `div`/`mod`);
//! a body item whose arithmetic meets a non-integer or a zero divisor
//! fails that ground instance, mirroring the translation's typing side
//! conditions. Unification applies the occurs check, matching equality
//! over finite constructor terms.

use std::collections::HashMap;
use std::rc::Rc;

use indexmap::{IndexMap, IndexSet};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::signatures::{collect_functions, detect_features, FeatureSet, FunctionSig};
use crate::syntax::{ArithOp, BodyItem, Clause, ClauseKind, ConstraintOp, Database, Term};

use super::universe::{enumerate_universe, within_bounds};
use super::{Bounds, OracleError};

type PredKey = (String, usize);
type Subst = HashMap<String, Term>;

/// A non-ground fact, matched by unification with fresh variable renaming.
#[derive(Debug, Clone)]
pub struct Scheme {
    pub pred: PredKey,
    pub args: Vec<Term>,
}

/// The derived ground facts of a program under bounds, plus the fact
/// schemes and per-iteration deltas.
#[derive(Debug, Clone)]
pub struct GroundFactSet {
    facts: IndexMap<PredKey, IndexSet<Vec<Term>>>,
    schemes: Vec<Scheme>,
    /// Newly derived facts of each iteration, in derivation order.
    pub deltas: Vec<Vec<(PredKey, Vec<Term>)>>,
    saturated: bool,
    bounds: Bounds,
    feats: FeatureSet,
    funcs: Vec<FunctionSig>,
}

impl GroundFactSet {
    pub fn is_saturated(&self) -> bool {
        self.saturated
    }

    pub fn len(&self) -> usize {
        self.facts.values().map(IndexSet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn facts_for(&self, name: &str, arity: usize) -> impl Iterator<Item = &Vec<Term>> {
        self.facts
            .get(&(name.to_string(), arity))
            .into_iter()
            .flat_map(|set| set.iter())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PredKey, &Vec<Term>)> {
        self.facts
            .iter()
            .flat_map(|(key, set)| set.iter().map(move |args| (key, args)))
    }

    pub fn schemes(&self) -> &[Scheme] {
        &self.schemes
    }

    /// True when the ground fact is derivable: present in the ground set
    /// or an instance of a fact scheme.
    pub fn holds(&self, name: &str, args: &[Term]) -> bool {
        debug_assert!(args.iter().all(Term::is_ground));
        let key = (name.to_string(), args.len());
        if let Some(set) = self.facts.get(&key) {
            if set.contains(args) {
                return true;
            }
        }
        let mut counter = 0;
        self.schemes.iter().any(|scheme| {
            scheme.pred == key && {
                let renamed = rename_apart(&scheme.args, &mut counter);
                let mut subst = Subst::new();
                renamed
                    .iter()
                    .zip(args)
                    .all(|(pattern, value)| unify(pattern, value, &mut subst))
            }
        })
    }
}

/// Bounded derivability of one query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryAnswer {
    pub derivable: bool,
    /// Ground substitution for the query's variables when derivable.
    pub witness: Option<Vec<(String, Term)>>,
    /// Whether the fixpoint reached saturation; a negative answer without
    /// saturation only means "unknown at these bounds".
    pub saturated: bool,
}

// ---------------------------------------------------------------------
// Clause compilation
// ---------------------------------------------------------------------

/// A clause body prepared for evaluation: predicate atoms joined against
/// the fact set, everything else treated as a constraint. Arguments
/// containing arithmetic are replaced by fresh variables equated to the
/// expression, so patterns stay free-constructor terms.
#[derive(Debug, Clone)]
struct Rule {
    head: (PredKey, Vec<Term>),
    atoms: Vec<(PredKey, Vec<Term>)>,
    constraints: Vec<BodyItem>,
}

fn contains_arith(term: &Term) -> bool {
    match term {
        Term::ArithExpr(..) => true,
        Term::Var(_) | Term::Atom(_) | Term::IntLit(_) => false,
        Term::Compound(_, args) => args.iter().any(contains_arith),
        Term::ListTerm(elements, tail) => {
            elements.iter().any(contains_arith) || tail.as_deref().is_some_and(contains_arith)
        }
    }
}

fn extract_arith(
    args: &[Term],
    constraints: &mut Vec<BodyItem>,
    fresh_counter: &mut usize,
) -> Vec<Term> {
    args.iter()
        .map(|arg| {
            if contains_arith(arg) {
                let name = format!("\u{2}x{}", *fresh_counter);
                *fresh_counter += 1;
                constraints.push(BodyItem::ArithConstraint(
                    ConstraintOp::Eq,
                    Term::Var(name.clone()),
                    arg.clone(),
                ));
                Term::Var(name)
            } else {
                arg.clone()
            }
        })
        .collect()
}

/// True when a pattern can never denote a well-typed value: some list
/// tail is a non-list, non-variable term. The translation of such a
/// pattern carries an unsatisfiable `aList` assumption, so the clause is
/// vacuous.
fn statically_ill_typed(term: &Term) -> bool {
    match term {
        Term::Var(_) | Term::Atom(_) | Term::IntLit(_) => false,
        Term::Compound(_, args) | Term::ArithExpr(_, args) => {
            args.iter().any(statically_ill_typed)
        }
        Term::ListTerm(elements, tail) => {
            elements.iter().any(statically_ill_typed)
                || match tail.as_deref() {
                    None | Some(Term::Var(_)) => false,
                    Some(inner @ Term::ListTerm(..)) => statically_ill_typed(inner),
                    Some(_) => true,
                }
        }
    }
}

fn compile_clause(
    clause: &Clause,
    fresh_counter: &mut usize,
) -> Result<CompiledClause, OracleError> {
    let mut constraints = Vec::new();
    let mut atoms = Vec::new();
    for item in &clause.body {
        match item {
            BodyItem::Call(name, args) => {
                let patterns = extract_arith(args, &mut constraints, fresh_counter);
                atoms.push(((name.clone(), args.len()), patterns));
            }
            BodyItem::Negation(inner) => {
                // Same restriction as the translator: negation only over
                // constraints.
                match inner.as_ref() {
                    BodyItem::Call(name, args) => {
                        return Err(OracleError::NegatedCall {
                            predicate: format!("{name}/{}", args.len()),
                        });
                    }
                    BodyItem::Negation(_) => {
                        return Err(OracleError::NegatedCall {
                            predicate: "\\+".to_string(),
                        });
                    }
                    _ => constraints.push(item.clone()),
                }
            }
            other => constraints.push(other.clone()),
        }
    }
    let patterns_ill = |atoms: &[(PredKey, Vec<Term>)]| {
        atoms
            .iter()
            .any(|(_, patterns)| patterns.iter().any(statically_ill_typed))
    };
    match clause.kind() {
        ClauseKind::Query => {
            if patterns_ill(&atoms) {
                return Ok(CompiledClause::Dead);
            }
            Ok(CompiledClause::Query { atoms, constraints })
        }
        _ => {
            let head = clause.head.as_ref().unwrap();
            let head_args = extract_arith(&head.args, &mut constraints, fresh_counter);
            if patterns_ill(&atoms) || head_args.iter().any(statically_ill_typed) {
                return Ok(CompiledClause::Dead);
            }
            let rule = Rule {
                head: ((head.name.clone(), head.args.len()), head_args),
                atoms,
                constraints,
            };
            // A bodyless clause with ground constructor-only arguments is a
            // plain fact; with variables but no constraints it is a scheme;
            // otherwise it evaluates like a rule without atoms.
            if rule.atoms.is_empty() && rule.constraints.is_empty() {
                let ground = rule.head.1.iter().all(Term::is_ground);
                if ground {
                    return Ok(CompiledClause::Fact(rule.head));
                }
                return Ok(CompiledClause::Scheme(Scheme {
                    pred: rule.head.0,
                    args: rule.head.1,
                }));
            }
            Ok(CompiledClause::Rule(rule))
        }
    }
}

enum CompiledClause {
    Fact((PredKey, Vec<Term>)),
    Scheme(Scheme),
    Rule(Rule),
    Query {
        atoms: Vec<(PredKey, Vec<Term>)>,
        constraints: Vec<BodyItem>,
    },
    /// A clause whose patterns can never be well-typed.
    Dead,
}

// ---------------------------------------------------------------------
// Substitutions, unification, arithmetic
// ---------------------------------------------------------------------

fn shallow<'a>(term: &'a Term, subst: &'a Subst) -> &'a Term {
    let mut current = term;
    while let Term::Var(name) = current {
        match subst.get(name) {
            Some(bound) => current = bound,
            None => break,
        }
    }
    current
}

fn resolve(term: &Term, subst: &Subst) -> Term {
    match shallow(term, subst) {
        Term::Var(name) => Term::Var(name.clone()),
        Term::Atom(name) => Term::Atom(name.clone()),
        Term::IntLit(value) => Term::IntLit(value.clone()),
        Term::Compound(name, args) => Term::Compound(
            name.clone(),
            args.iter().map(|a| resolve(a, subst)).collect(),
        ),
        Term::ArithExpr(op, args) => {
            Term::ArithExpr(*op, args.iter().map(|a| resolve(a, subst)).collect())
        }
        Term::ListTerm(elements, tail) => Term::ListTerm(
            elements.iter().map(|e| resolve(e, subst)).collect(),
            tail.as_deref().map(|t| Box::new(resolve(t, subst))),
        ),
    }
}

fn occurs(name: &str, term: &Term, subst: &Subst) -> bool {
    match shallow(term, subst) {
        Term::Var(other) => other == name,
        Term::Atom(_) | Term::IntLit(_) => false,
        Term::Compound(_, args) | Term::ArithExpr(_, args) => {
            args.iter().any(|a| occurs(name, a, subst))
        }
        Term::ListTerm(elements, tail) => {
            elements.iter().any(|e| occurs(name, e, subst))
                || tail.as_deref().is_some_and(|t| occurs(name, t, subst))
        }
    }
}

/// Syntactic unification with occurs check. Terms must be free of
/// arithmetic nodes (guaranteed by clause compilation and preparation).
fn unify(a: &Term, b: &Term, subst: &mut Subst) -> bool {
    let a = shallow(a, subst).clone();
    let b = shallow(b, subst).clone();
    match (&a, &b) {
        (Term::Var(x), Term::Var(y)) if x == y => true,
        (Term::Var(x), other) | (other, Term::Var(x)) => {
            if occurs(x, other, subst) {
                return false;
            }
            subst.insert(x.clone(), other.clone());
            true
        }
        (Term::Atom(x), Term::Atom(y)) => x == y,
        (Term::IntLit(x), Term::IntLit(y)) => x == y,
        (Term::Compound(f, xs), Term::Compound(g, ys)) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| unify(x, y, subst))
        }
        (Term::ListTerm(xs, xt), Term::ListTerm(ys, yt)) => {
            unify_lists(xs, xt.as_deref(), ys, yt.as_deref(), subst)
        }
        _ => false,
    }
}

fn rebuild_list(elements: &[Term], tail: Option<&Term>) -> Term {
    if elements.is_empty() {
        match tail {
            Some(t) => t.clone(),
            None => Term::nil(),
        }
    } else {
        Term::ListTerm(elements.to_vec(), tail.cloned().map(Box::new))
    }
}

fn unify_lists(
    xs: &[Term],
    xt: Option<&Term>,
    ys: &[Term],
    yt: Option<&Term>,
    subst: &mut Subst,
) -> bool {
    match (xs.split_first(), ys.split_first()) {
        (Some((x, xrest)), Some((y, yrest))) => {
            unify(x, y, subst) && unify_lists(xrest, xt, yrest, yt, subst)
        }
        (None, _) => match xt {
            Some(tail) => unify(tail, &rebuild_list(ys, yt), subst),
            None => ys.is_empty() && yt.is_none_or(|t| unify(&Term::nil(), t, subst)),
        },
        (_, None) => match yt {
            Some(tail) => unify(tail, &rebuild_list(xs, xt), subst),
            None => xs.is_empty() && xt.is_none_or(|t| unify(&Term::nil(), t, subst)),
        },
    }
}

fn rename_apart(args: &[Term], counter: &mut usize) -> Vec<Term> {
    *counter += 1;
    let tag = *counter;
    fn rename(term: &Term, tag: usize) -> Term {
        match term {
            Term::Var(name) => Term::Var(format!("\u{1}m{tag}\u{1}{name}")),
            Term::Atom(_) | Term::IntLit(_) => term.clone(),
            Term::Compound(name, args) => {
                Term::Compound(name.clone(), args.iter().map(|a| rename(a, tag)).collect())
            }
            Term::ArithExpr(op, args) => {
                Term::ArithExpr(*op, args.iter().map(|a| rename(a, tag)).collect())
            }
            Term::ListTerm(elements, tail) => Term::ListTerm(
                elements.iter().map(|e| rename(e, tag)).collect(),
                tail.as_deref().map(|t| Box::new(rename(t, tag))),
            ),
        }
    }
    args.iter().map(|a| rename(a, tag)).collect()
}

/// SMT-LIB integer division and remainder (Euclidean; remainder in
/// `[0, |divisor|)`). `None` on division by zero.
fn div_mod_euclid(a: &BigInt, b: &BigInt) -> Option<(BigInt, BigInt)> {
    if b.is_zero() {
        return None;
    }
    let (mut q, mut r) = a.div_mod_floor(b);
    if b.is_negative() && !r.is_zero() {
        q += BigInt::one();
        r -= b;
    }
    Some((q, r))
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Ground {
    /// Fully ground normal form: arithmetic evaluated, lists proper.
    Done(Term),
    /// Unbound variables remain.
    Open,
    /// Ill-typed arithmetic, improper list, or division by zero.
    Fail,
}

/// Evaluate to ground normal form under the substitution.
fn eval_ground(term: &Term, subst: &Subst) -> Ground {
    match shallow(term, subst) {
        Term::Var(_) => Ground::Open,
        Term::Atom(name) => Ground::Done(Term::Atom(name.clone())),
        Term::IntLit(value) => Ground::Done(Term::IntLit(value.clone())),
        Term::Compound(name, args) => {
            let mut done = Vec::with_capacity(args.len());
            let mut open = false;
            for arg in args {
                match eval_ground(arg, subst) {
                    Ground::Done(t) => done.push(t),
                    Ground::Open => open = true,
                    Ground::Fail => return Ground::Fail,
                }
            }
            if open {
                Ground::Open
            } else {
                Ground::Done(Term::Compound(name.clone(), done))
            }
        }
        Term::ArithExpr(op, args) => {
            let mut values = Vec::with_capacity(args.len());
            let mut open = false;
            for arg in args {
                match eval_ground(arg, subst) {
                    Ground::Done(Term::IntLit(v)) => values.push(v),
                    Ground::Done(_) => return Ground::Fail,
                    Ground::Open => open = true,
                    Ground::Fail => return Ground::Fail,
                }
            }
            if open {
                return Ground::Open;
            }
            let result = match (op, values.as_slice()) {
                (ArithOp::Neg, [v]) => Some(-v),
                (ArithOp::Add, [a, b]) => Some(a + b),
                (ArithOp::Sub, [a, b]) => Some(a - b),
                (ArithOp::Mul, [a, b]) => Some(a * b),
                (ArithOp::Div, [a, b]) => div_mod_euclid(a, b).map(|(q, _)| q),
                (ArithOp::Mod, [a, b]) => div_mod_euclid(a, b).map(|(_, r)| r),
                _ => None,
            };
            match result {
                Some(value) => Ground::Done(Term::IntLit(value)),
                None => Ground::Fail,
            }
        }
        Term::ListTerm(elements, tail) => {
            let mut done = Vec::with_capacity(elements.len());
            let mut open = false;
            for element in elements {
                match eval_ground(element, subst) {
                    Ground::Done(t) => done.push(t),
                    Ground::Open => open = true,
                    Ground::Fail => return Ground::Fail,
                }
            }
            match tail.as_deref() {
                None => {
                    if open {
                        Ground::Open
                    } else {
                        Ground::Done(Term::ListTerm(done, None))
                    }
                }
                Some(tail) => match eval_ground(tail, subst) {
                    Ground::Done(Term::ListTerm(mut rest, None)) => {
                        if open {
                            Ground::Open
                        } else {
                            done.append(&mut rest);
                            Ground::Done(Term::ListTerm(done, None))
                        }
                    }
                    Ground::Done(_) => Ground::Fail,
                    Ground::Open => Ground::Open,
                    Ground::Fail => Ground::Fail,
                },
            }
        }
    }
}

/// Prepare a term for unification: evaluate arithmetic (which must be
/// closed), flatten ground list tails, keep variables.
enum Prepared {
    Term(Term),
    Open,
    Fail,
}

fn prepare(term: &Term, subst: &Subst) -> Prepared {
    match shallow(term, subst) {
        Term::Var(name) => Prepared::Term(Term::Var(name.clone())),
        Term::Atom(name) => Prepared::Term(Term::Atom(name.clone())),
        Term::IntLit(value) => Prepared::Term(Term::IntLit(value.clone())),
        Term::ArithExpr(..) => match eval_ground(term, subst) {
            Ground::Done(t) => Prepared::Term(t),
            Ground::Open => Prepared::Open,
            Ground::Fail => Prepared::Fail,
        },
        Term::Compound(name, args) => {
            let mut prepared = Vec::with_capacity(args.len());
            for arg in args {
                match prepare(arg, subst) {
                    Prepared::Term(t) => prepared.push(t),
                    other => return other,
                }
            }
            Prepared::Term(Term::Compound(name.clone(), prepared))
        }
        Term::ListTerm(elements, tail) => {
            let mut prepared = Vec::with_capacity(elements.len());
            for element in elements {
                match prepare(element, subst) {
                    Prepared::Term(t) => prepared.push(t),
                    other => return other,
                }
            }
            match tail.as_deref() {
                None => Prepared::Term(Term::ListTerm(prepared, None)),
                Some(tail) => match prepare(tail, subst) {
                    Prepared::Term(Term::ListTerm(mut rest_elems, rest_tail)) => {
                        prepared.append(&mut rest_elems);
                        Prepared::Term(Term::ListTerm(prepared, rest_tail))
                    }
                    Prepared::Term(Term::Var(v)) => {
                        Prepared::Term(Term::ListTerm(prepared, Some(Box::new(Term::Var(v)))))
                    }
                    // A ground non-list tail is ill-typed.
                    Prepared::Term(_) => Prepared::Fail,
                    other => other,
                },
            }
        }
    }
}

// ---------------------------------------------------------------------
// Constraint propagation
// ---------------------------------------------------------------------

enum Step {
    Consumed,
    Failed,
    Defer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Truth {
    True,
    False,
    Fail,
    Open,
}

fn compare_ints(op: ConstraintOp, a: &BigInt, b: &BigInt) -> bool {
    match op {
        ConstraintOp::Lt => a < b,
        ConstraintOp::Le => a <= b,
        ConstraintOp::Gt => a > b,
        ConstraintOp::Ge => a >= b,
        ConstraintOp::Ne => a != b,
        ConstraintOp::Eq => a == b,
    }
}

/// Truth of a body item that must not bind anything (negation scope).
fn ground_truth(item: &BodyItem, subst: &Subst) -> Truth {
    match item {
        BodyItem::Unify(lhs, rhs) | BodyItem::ArithConstraint(ConstraintOp::Eq, lhs, rhs) => {
            match (eval_ground(lhs, subst), eval_ground(rhs, subst)) {
                (Ground::Fail, _) | (_, Ground::Fail) => Truth::Fail,
                (Ground::Open, _) | (_, Ground::Open) => Truth::Open,
                (Ground::Done(a), Ground::Done(b)) => {
                    if a == b {
                        Truth::True
                    } else {
                        Truth::False
                    }
                }
            }
        }
        BodyItem::TermDiseq(lhs, rhs) => {
            match ground_truth(&BodyItem::Unify(lhs.clone(), rhs.clone()), subst) {
                Truth::True => Truth::False,
                Truth::False => Truth::True,
                other => other,
            }
        }
        BodyItem::ArithConstraint(op, lhs, rhs) => {
            match (eval_ground(lhs, subst), eval_ground(rhs, subst)) {
                (Ground::Fail, _) | (_, Ground::Fail) => Truth::Fail,
                (Ground::Open, _) | (_, Ground::Open) => Truth::Open,
                (Ground::Done(Term::IntLit(a)), Ground::Done(Term::IntLit(b))) => {
                    if compare_ints(*op, &a, &b) {
                        Truth::True
                    } else {
                        Truth::False
                    }
                }
                // Comparison over non-integers fails the typing assumption.
                (Ground::Done(_), Ground::Done(_)) => Truth::Fail,
            }
        }
        BodyItem::Negation(inner) => match ground_truth(inner, subst) {
            Truth::True => Truth::False,
            Truth::False => Truth::True,
            other => other,
        },
        BodyItem::Call(..) => Truth::Fail,
    }
}

fn step_constraint(item: &BodyItem, subst: &mut Subst) -> Step {
    match item {
        BodyItem::Unify(lhs, rhs) | BodyItem::ArithConstraint(ConstraintOp::Eq, lhs, rhs) => {
            match (prepare(lhs, subst), prepare(rhs, subst)) {
                (Prepared::Fail, _) | (_, Prepared::Fail) => Step::Failed,
                (Prepared::Term(a), Prepared::Term(b)) => {
                    if unify(&a, &b, subst) {
                        Step::Consumed
                    } else {
                        Step::Failed
                    }
                }
                _ => Step::Defer,
            }
        }
        BodyItem::TermDiseq(..) | BodyItem::ArithConstraint(..) | BodyItem::Negation(_) => {
            match ground_truth(item, subst) {
                Truth::True => Step::Consumed,
                Truth::False | Truth::Fail => Step::Failed,
                Truth::Open => Step::Defer,
            }
        }
        BodyItem::Call(..) => Step::Failed,
    }
}

/// Run constraints to a propagation fixpoint. Returns false when some
/// constraint failed.
fn propagate(pending: &mut Vec<BodyItem>, subst: &mut Subst) -> bool {
    loop {
        let mut progress = false;
        let mut index = 0;
        while index < pending.len() {
            match step_constraint(&pending[index], subst) {
                Step::Failed => return false,
                Step::Consumed => {
                    pending.remove(index);
                    progress = true;
                }
                Step::Defer => index += 1,
            }
        }
        if !progress {
            return true;
        }
    }
}

// ---------------------------------------------------------------------
// Search
// ---------------------------------------------------------------------

struct SearchCtx<'a> {
    facts: &'a IndexMap<PredKey, IndexSet<Vec<Term>>>,
    delta: Option<&'a IndexMap<PredKey, Vec<Vec<Term>>>>,
    schemes: &'a [Scheme],
    bounds: &'a Bounds,
    funcs: &'a [FunctionSig],
    feats: FeatureSet,
    universe: Option<Rc<Vec<Term>>>,
    rename_counter: usize,
}

impl<'a> SearchCtx<'a> {
    fn universe(&mut self) -> Result<Rc<Vec<Term>>, OracleError> {
        if let Some(u) = &self.universe {
            return Ok(u.clone());
        }
        let universe = Rc::new(enumerate_universe(self.funcs, self.feats, self.bounds)?);
        self.universe = Some(universe.clone());
        Ok(universe)
    }
}

/// Variables inside arithmetic contexts of the pending constraints; these
/// range over the integer interval instead of the whole universe.
fn int_constrained_vars(pending: &[BodyItem], subst: &Subst, out: &mut IndexSet<String>) {
    fn arith_vars(term: &Term, subst: &Subst, out: &mut IndexSet<String>) {
        match term {
            Term::ArithExpr(_, args) => {
                for arg in args {
                    term_vars(&resolve(arg, subst), out);
                }
            }
            Term::Compound(_, args) => {
                for arg in args {
                    arith_vars(arg, subst, out);
                }
            }
            Term::ListTerm(elements, tail) => {
                for element in elements {
                    arith_vars(element, subst, out);
                }
                if let Some(tail) = tail {
                    arith_vars(tail, subst, out);
                }
            }
            _ => {}
        }
    }
    fn term_vars(term: &Term, out: &mut IndexSet<String>) {
        term.visit_vars(&mut |name| {
            out.insert(name.to_string());
        });
    }
    for item in pending {
        match item {
            BodyItem::ArithConstraint(op, lhs, rhs) if *op != ConstraintOp::Eq => {
                term_vars(&resolve(lhs, subst), out);
                term_vars(&resolve(rhs, subst), out);
            }
            BodyItem::ArithConstraint(_, lhs, rhs) | BodyItem::Unify(lhs, rhs) => {
                arith_vars(&resolve(lhs, subst), subst, out);
                arith_vars(&resolve(rhs, subst), subst, out);
            }
            BodyItem::TermDiseq(lhs, rhs) => {
                arith_vars(&resolve(lhs, subst), subst, out);
                arith_vars(&resolve(rhs, subst), subst, out);
            }
            BodyItem::Negation(inner) => {
                int_constrained_vars(std::slice::from_ref(inner.as_ref()), subst, out)
            }
            BodyItem::Call(..) => {}
        }
    }
}

fn unbound_vars_of(term: &Term, subst: &Subst, out: &mut IndexSet<String>) {
    resolve(term, subst).visit_vars(&mut |name| {
        out.insert(name.to_string());
    });
}

/// Lower bounds of depth and list length that further bindings can only
/// increase; a violation here prunes the whole branch.
fn exceeds_bounds_already(term: &Term, bounds: &Bounds) -> bool {
    fn min_depth(term: &Term) -> u32 {
        match term {
            Term::Var(_) | Term::Atom(_) | Term::IntLit(_) => 1,
            Term::Compound(_, args) | Term::ArithExpr(_, args) => {
                1 + args.iter().map(min_depth).max().unwrap_or(0)
            }
            Term::ListTerm(..) => {
                let (elements, _) = flatten_list(term);
                1 + elements.iter().map(|e| min_depth(e)).max().unwrap_or(0)
            }
        }
    }
    // Collect the known elements across chained tails.
    fn flatten_list(term: &Term) -> (Vec<&Term>, bool) {
        let mut elements = Vec::new();
        let mut current = term;
        loop {
            match current {
                Term::ListTerm(es, tail) => {
                    elements.extend(es.iter());
                    match tail.as_deref() {
                        Some(t) => current = t,
                        None => return (elements, true),
                    }
                }
                _ => return (elements, false),
            }
        }
    }
    match term {
        Term::IntLit(value) => !bounds.contains_int(value),
        Term::Var(_) | Term::Atom(_) => false,
        Term::Compound(_, args) | Term::ArithExpr(_, args) => {
            min_depth(term) > bounds.term_depth
                || args.iter().any(|a| exceeds_bounds_already(a, bounds))
        }
        Term::ListTerm(..) => {
            let (elements, _) = flatten_list(term);
            elements.len() > bounds.max_list_len
                || min_depth(term) > bounds.term_depth
                || elements
                    .into_iter()
                    .any(|e| exceeds_bounds_already(e, bounds))
        }
    }
}

/// Enumerate the remaining unbound variables, re-propagating after each
/// assignment, and emit every consistent ground solution.
fn finalize(
    pending: Vec<BodyItem>,
    subst: Subst,
    goal_terms: &[Term],
    ctx: &mut SearchCtx,
    emit: &mut dyn FnMut(&Subst, &mut SearchCtx) -> Result<bool, OracleError>,
) -> Result<bool, OracleError> {
    let mut pending = pending;
    let mut subst = subst;
    if !propagate(&mut pending, &mut subst) {
        return Ok(true);
    }
    for goal in goal_terms {
        if exceeds_bounds_already(&resolve(goal, &subst), ctx.bounds) {
            return Ok(true);
        }
    }

    // Deterministic pick: constraint variables first, then goal variables.
    let mut int_vars = IndexSet::new();
    int_constrained_vars(&pending, &subst, &mut int_vars);
    let mut candidates = IndexSet::new();
    for item in &pending {
        let mut stack = vec![item];
        while let Some(item) = stack.pop() {
            match item {
                BodyItem::Unify(l, r)
                | BodyItem::TermDiseq(l, r)
                | BodyItem::ArithConstraint(_, l, r) => {
                    unbound_vars_of(l, &subst, &mut candidates);
                    unbound_vars_of(r, &subst, &mut candidates);
                }
                BodyItem::Negation(nested) => stack.push(nested.as_ref()),
                BodyItem::Call(..) => {}
            }
        }
    }
    for term in goal_terms {
        unbound_vars_of(term, &subst, &mut candidates);
    }

    match candidates.first() {
        None => {
            if pending.is_empty() {
                emit(&subst, ctx)
            } else {
                // Ground but unconsumed constraints cannot happen: ground
                // items always step to Consumed or Failed.
                Ok(true)
            }
        }
        Some(var) => {
            let var = var.clone();
            if int_vars.contains(&var) {
                let mut value = ctx.bounds.int_range.0.clone();
                while value <= ctx.bounds.int_range.1 {
                    let mut branch_subst = subst.clone();
                    branch_subst.insert(var.clone(), Term::IntLit(value.clone()));
                    if !finalize(pending.clone(), branch_subst, goal_terms, ctx, emit)? {
                        return Ok(false);
                    }
                    value += BigInt::one();
                }
                Ok(true)
            } else {
                let universe = ctx.universe()?;
                for term in universe.iter() {
                    let mut branch_subst = subst.clone();
                    branch_subst.insert(var.clone(), term.clone());
                    if !finalize(pending.clone(), branch_subst, goal_terms, ctx, emit)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }
}

/// Join the remaining atoms against the fact set (and schemes), most
/// instantiated atom first.
#[allow(clippy::too_many_arguments)]
fn search(
    atoms: &[(usize, (PredKey, Vec<Term>))],
    delta_position: Option<usize>,
    pending: &[BodyItem],
    subst: &Subst,
    goal_terms: &[Term],
    ctx: &mut SearchCtx,
    emit: &mut dyn FnMut(&Subst, &mut SearchCtx) -> Result<bool, OracleError>,
) -> Result<bool, OracleError> {
    let mut pending_now = pending.to_vec();
    let mut subst_now = subst.clone();
    if !propagate(&mut pending_now, &mut subst_now) {
        return Ok(true);
    }

    if atoms.is_empty() {
        return finalize(pending_now, subst_now, goal_terms, ctx, emit);
    }

    // Pick the atom with the most ground arguments under the current
    // substitution; ties resolve to the leftmost.
    let chosen = atoms
        .iter()
        .enumerate()
        .max_by_key(|(position, (_, (_, args)))| {
            let ground_args = args
                .iter()
                .filter(|arg| matches!(eval_ground(arg, &subst_now), Ground::Done(_)))
                .count();
            (ground_args, usize::MAX - position)
        })
        .map(|(position, _)| position)
        .unwrap();
    let (original_index, (pred, patterns)) = &atoms[chosen];
    let rest: Vec<(usize, (PredKey, Vec<Term>))> = atoms
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != chosen)
        .map(|(_, a)| a.clone())
        .collect();

    let from_delta = delta_position == Some(*original_index);
    if from_delta {
        let facts: Vec<Vec<Term>> = ctx
            .delta
            .and_then(|d| d.get(pred))
            .map(|v| v.to_vec())
            .unwrap_or_default();
        for fact in &facts {
            let mut branch = subst_now.clone();
            if patterns
                .iter()
                .zip(fact)
                .all(|(pattern, value)| unify(pattern, value, &mut branch))
                && !search(
                    &rest,
                    delta_position,
                    &pending_now,
                    &branch,
                    goal_terms,
                    ctx,
                    emit,
                )?
            {
                return Ok(false);
            }
        }
        return Ok(true);
    }

    let facts: Vec<Vec<Term>> = ctx
        .facts
        .get(pred)
        .map(|set| set.iter().cloned().collect())
        .unwrap_or_default();
    for fact in &facts {
        let mut branch = subst_now.clone();
        if patterns
            .iter()
            .zip(fact)
            .all(|(pattern, value)| unify(pattern, value, &mut branch))
            && !search(
                &rest,
                delta_position,
                &pending_now,
                &branch,
                goal_terms,
                ctx,
                emit,
            )?
        {
            return Ok(false);
        }
    }
    let schemes: Vec<Scheme> = ctx
        .schemes
        .iter()
        .filter(|s| s.pred == *pred)
        .cloned()
        .collect();
    for scheme in &schemes {
        let renamed = rename_apart(&scheme.args, &mut ctx.rename_counter);
        let mut branch = subst_now.clone();
        if patterns
            .iter()
            .zip(&renamed)
            .all(|(pattern, value)| unify(pattern, value, &mut branch))
            && !search(
                &rest,
                delta_position,
                &pending_now,
                &branch,
                goal_terms,
                ctx,
                emit,
            )?
        {
            return Ok(false);
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------
// Fixpoint and queries
// ---------------------------------------------------------------------

/// Least fixpoint of the program's facts and rules within bounds, with
/// features detected from the database.
pub fn fixpoint(db: &Database, bounds: &Bounds) -> Result<GroundFactSet, OracleError> {
    fixpoint_with(db, bounds, detect_features(db))
}

/// Fixpoint with an explicit feature set, for callers that need integers
/// or lists in the universe beyond what the program mentions.
pub fn fixpoint_with(
    db: &Database,
    bounds: &Bounds,
    feats: FeatureSet,
) -> Result<GroundFactSet, OracleError> {
    let funcs = collect_functions(db);
    let mut fresh_counter = 0;

    let mut facts: IndexMap<PredKey, IndexSet<Vec<Term>>> = IndexMap::new();
    let mut schemes: Vec<Scheme> = Vec::new();
    let mut rules: Vec<Rule> = Vec::new();
    let mut initial: Vec<(PredKey, Vec<Term>)> = Vec::new();

    for clause in db.definitions() {
        match compile_clause(clause, &mut fresh_counter)? {
            CompiledClause::Fact((pred, args)) => {
                // Normalize ground arithmetic such as p(1+1).
                let mut normalized = Vec::with_capacity(args.len());
                let empty = Subst::new();
                let mut ok = true;
                for arg in &args {
                    match eval_ground(arg, &empty) {
                        Ground::Done(t) => normalized.push(t),
                        _ => {
                            ok = false;
                            break;
                        }
                    }
                }
                if ok && normalized.iter().all(|t| within_bounds(t, bounds)) {
                    initial.push((pred, normalized));
                }
            }
            CompiledClause::Scheme(scheme) => schemes.push(scheme),
            CompiledClause::Rule(rule) => rules.push(rule),
            CompiledClause::Dead => {}
            CompiledClause::Query { .. } => unreachable!("definitions() filters queries"),
        }
    }

    let mut deltas: Vec<Vec<(PredKey, Vec<Term>)>> = Vec::new();
    let mut delta_map: IndexMap<PredKey, Vec<Vec<Term>>> = IndexMap::new();
    let mut first_delta = Vec::new();
    for (pred, args) in initial {
        let entry = facts.entry(pred.clone()).or_default();
        if entry.insert(args.clone()) {
            delta_map
                .entry(pred.clone())
                .or_default()
                .push(args.clone());
            first_delta.push((pred, args));
        }
    }
    deltas.push(first_delta);

    let mut saturated = false;
    for round in 0..bounds.max_iterations {
        let naive = round == 0;
        let mut new_facts: Vec<(PredKey, Vec<Term>)> = Vec::new();

        for rule in &rules {
            let head = &rule.head;
            let atom_count = rule.atoms.len();
            let delta_choices: Vec<Option<usize>> = if naive {
                vec![None]
            } else if atom_count == 0 {
                // Constraint-only rules fire once, in the naive round.
                continue;
            } else {
                (0..atom_count).map(Some).collect()
            };

            for delta_position in delta_choices {
                let mut ctx = SearchCtx {
                    facts: &facts,
                    delta: if naive { None } else { Some(&delta_map) },
                    schemes: &schemes,
                    bounds,
                    funcs: &funcs,
                    feats,
                    universe: None,
                    rename_counter: 0,
                };
                let atoms: Vec<(usize, (PredKey, Vec<Term>))> =
                    rule.atoms.iter().cloned().enumerate().collect();
                let goal_terms = head.1.clone();
                let mut emit = |subst: &Subst, _ctx: &mut SearchCtx| -> Result<bool, OracleError> {
                    let mut args = Vec::with_capacity(head.1.len());
                    for pattern in &head.1 {
                        match eval_ground(pattern, subst) {
                            Ground::Done(t) => args.push(t),
                            // Ill-typed or non-ground heads drop the instance.
                            _ => return Ok(true),
                        }
                    }
                    if args.iter().all(|t| within_bounds(t, bounds)) {
                        new_facts.push((head.0.clone(), args));
                    }
                    Ok(true)
                };
                search(
                    &atoms,
                    delta_position,
                    &rule.constraints,
                    &Subst::new(),
                    &goal_terms,
                    &mut ctx,
                    &mut emit,
                )?;
            }
        }

        let mut delta: Vec<(PredKey, Vec<Term>)> = Vec::new();
        for (pred, args) in new_facts {
            let entry = facts.entry(pred.clone()).or_default();
            if entry.insert(args.clone()) {
                delta.push((pred, args));
            }
        }
        let mut next_delta_map: IndexMap<PredKey, Vec<Vec<Term>>> = IndexMap::new();
        for (pred, args) in &delta {
            next_delta_map
                .entry(pred.clone())
                .or_default()
                .push(args.clone());
        }
        let done = delta.is_empty();
        deltas.push(delta);
        delta_map = next_delta_map;
        if done {
            saturated = true;
            break;
        }
    }

    Ok(GroundFactSet {
        facts,
        schemes,
        deltas,
        saturated,
        bounds: bounds.clone(),
        feats,
        funcs,
    })
}

/// Bounded derivability of `query` against the saturated fact set.
pub fn query_holds(
    db: &Database,
    query: &Clause,
    bounds: &Bounds,
) -> Result<QueryAnswer, OracleError> {
    query_holds_with(db, query, bounds, detect_features(db))
}

pub fn query_holds_with(
    db: &Database,
    query: &Clause,
    bounds: &Bounds,
    feats: FeatureSet,
) -> Result<QueryAnswer, OracleError> {
    let factset = fixpoint_with(db, bounds, feats)?;
    query_on(&factset, query)
}

/// Evaluate a query against an existing fact set.
pub fn query_on(factset: &GroundFactSet, query: &Clause) -> Result<QueryAnswer, OracleError> {
    assert_eq!(query.kind(), ClauseKind::Query, "query_on expects a query");
    let mut fresh_counter = 0;
    let compiled = compile_clause(query, &mut fresh_counter)?;
    let (atoms, constraints) = match compiled {
        CompiledClause::Query { atoms, constraints } => (atoms, constraints),
        CompiledClause::Dead => {
            return Ok(QueryAnswer {
                derivable: false,
                witness: None,
                saturated: factset.is_saturated(),
            })
        }
        _ => unreachable!("queries compile to Query"),
    };

    let query_vars: Vec<String> = {
        let mut vars = IndexSet::new();
        for item in &query.body {
            item.visit_vars(&mut |name| {
                vars.insert(name.to_string());
            });
        }
        vars.into_iter().collect()
    };
    let goal_terms: Vec<Term> = query_vars.iter().map(|v| Term::Var(v.clone())).collect();

    let mut ctx = SearchCtx {
        facts: &factset.facts,
        delta: None,
        schemes: &factset.schemes,
        bounds: &factset.bounds,
        funcs: &factset.funcs,
        feats: factset.feats,
        universe: None,
        rename_counter: 0,
    };
    let atoms: Vec<(usize, (PredKey, Vec<Term>))> = atoms.into_iter().enumerate().collect();

    let mut witness: Option<Vec<(String, Term)>> = None;
    let mut emit = |subst: &Subst, _ctx: &mut SearchCtx| -> Result<bool, OracleError> {
        let mut bindings = Vec::with_capacity(query_vars.len());
        for var in &query_vars {
            match eval_ground(&Term::Var(var.clone()), subst) {
                Ground::Done(t) => bindings.push((var.clone(), t)),
                _ => return Ok(true),
            }
        }
        witness = Some(bindings);
        Ok(false)
    };
    search(
        &atoms,
        None,
        &constraints,
        &Subst::new(),
        &goal_terms,
        &mut ctx,
        &mut emit,
    )?;

    Ok(QueryAnswer {
        derivable: witness.is_some(),
        witness,
        saturated: factset.is_saturated(),
    })
}
