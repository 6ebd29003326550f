//! Structural equivalence of scripts, used by the golden tests.
//!
//! Two scripts are structurally equal when they match command by command
//! after normalization:
//!
//! - forall-bound variables are alpha-renamed canonically (by first use in
//!   the body), which also makes the binder-list order irrelevant;
//! - the datatype declaration style is already abstracted by the data
//!   model, and constructors are matched by name rather than position,
//!   since the reference encodings order them inconsistently;
//! - nested `and`s are flattened and single-element `and`s removed.
//!
//! Command order and conjunct order remain significant.

use super::{Command, DatatypeDecl, Script, SmtTerm, Sym};

pub fn structurally_equal(a: &Script, b: &Script) -> bool {
    if a.commands.len() != b.commands.len() {
        return false;
    }
    a.commands
        .iter()
        .zip(&b.commands)
        .all(|(ca, cb)| command_equal(ca, cb))
}

fn command_equal(a: &Command, b: &Command) -> bool {
    match (a, b) {
        (Command::DeclareDatatypes(da), Command::DeclareDatatypes(db)) => {
            da.len() == db.len() && da.iter().zip(db).all(|(x, y)| datatype_equal(x, y))
        }
        (Command::Assert(ta), Command::Assert(tb)) => normalize(ta) == normalize(tb),
        _ => a == b,
    }
}

fn datatype_equal(a: &DatatypeDecl, b: &DatatypeDecl) -> bool {
    if a.name != b.name || a.constructors.len() != b.constructors.len() {
        return false;
    }
    let mut sorted_a = a.constructors.clone();
    let mut sorted_b = b.constructors.clone();
    sorted_a.sort_by(|x, y| x.name.cmp(&y.name));
    sorted_b.sort_by(|x, y| x.name.cmp(&y.name));
    sorted_a == sorted_b
}

/// Canonical form of an assertion body.
pub fn normalize(term: &SmtTerm) -> SmtTerm {
    let flattened = flatten_ands(term);
    let mut counter = 0;
    alpha(&flattened, &mut Vec::new(), &mut counter)
}

fn flatten_ands(term: &SmtTerm) -> SmtTerm {
    match term {
        SmtTerm::Apply(head, args) if head.content() == "and" => {
            let mut conjuncts = Vec::new();
            for arg in args {
                match flatten_ands(arg) {
                    SmtTerm::Apply(h, inner) if h.content() == "and" => conjuncts.extend(inner),
                    other => conjuncts.push(other),
                }
            }
            if conjuncts.len() == 1 {
                conjuncts.pop().unwrap()
            } else {
                SmtTerm::Apply(head.clone(), conjuncts)
            }
        }
        SmtTerm::Apply(head, args) => {
            SmtTerm::Apply(head.clone(), args.iter().map(flatten_ands).collect())
        }
        SmtTerm::Forall(bindings, body) => {
            SmtTerm::Forall(bindings.clone(), Box::new(flatten_ands(body)))
        }
        SmtTerm::Tester(ctor, arg) => SmtTerm::Tester(ctor.clone(), Box::new(flatten_ands(arg))),
        other => other.clone(),
    }
}

/// One scope of bound variables: original name paired with its canonical
/// replacement, assigned lazily in order of first use.
struct Scope {
    bindings: Vec<(Sym, super::Sort, Option<Sym>)>,
    next_id: usize,
}

fn alpha(term: &SmtTerm, scopes: &mut Vec<Scope>, _counter: &mut usize) -> SmtTerm {
    match term {
        SmtTerm::Symbol(sym) => SmtTerm::Symbol(rename(sym, scopes)),
        SmtTerm::IntConst(_) => term.clone(),
        SmtTerm::Apply(head, args) => SmtTerm::Apply(
            head.clone(),
            args.iter().map(|a| alpha(a, scopes, _counter)).collect(),
        ),
        SmtTerm::Tester(ctor, arg) => {
            SmtTerm::Tester(ctor.clone(), Box::new(alpha(arg, scopes, _counter)))
        }
        SmtTerm::Forall(bindings, body) => {
            scopes.push(Scope {
                bindings: bindings
                    .iter()
                    .map(|(name, sort)| (name.clone(), *sort, None))
                    .collect(),
                next_id: 0,
            });
            let body = alpha(body, scopes, _counter);
            let mut scope = scopes.pop().unwrap();
            // Binders never used in the body keep list order, after the
            // used ones.
            for slot in &mut scope.bindings {
                if slot.2.is_none() {
                    slot.2 = Some(canonical_name(scope.next_id));
                    scope.next_id += 1;
                }
            }
            let mut new_bindings: Vec<(Sym, super::Sort)> = scope
                .bindings
                .iter()
                .map(|(_, sort, canon)| (canon.clone().unwrap(), *sort))
                .collect();
            new_bindings.sort_by(|(a, _), (b, _)| a.cmp(b));
            SmtTerm::Forall(new_bindings, Box::new(body))
        }
    }
}

fn rename(sym: &Sym, scopes: &mut [Scope]) -> Sym {
    for scope in scopes.iter_mut().rev() {
        if let Some(slot) = scope.bindings.iter_mut().find(|(name, ..)| name == sym) {
            if slot.2.is_none() {
                slot.2 = Some(canonical_name(scope.next_id));
                scope.next_id += 1;
            }
            return slot.2.clone().unwrap();
        }
    }
    sym.clone()
}

fn canonical_name(id: usize) -> Sym {
    // `!` cannot start a user symbol, so canonical names never collide
    // with free symbols.
    Sym::new(format!("!v{id:04}"))
}
