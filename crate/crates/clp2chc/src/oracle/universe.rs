//! Enumeration of the bounded Herbrand universe.

use num_bigint::BigInt;
use num_traits::One;

use crate::signatures::{FeatureSet, FunctionSig};
use crate::syntax::Term;

use super::{Bounds, OracleError};

/// All ground terms buildable from the signature within the bounds:
/// atoms, integers in range (when used), functions applied to smaller
/// terms, and lists of smaller terms up to the length bound (when used).
/// Each list nesting level counts one toward the depth.
///
/// The result is deterministic: depth levels in order, and within a level
/// compounds by signature order then lists by length.
pub fn enumerate_universe(
    funcs: &[FunctionSig],
    feats: FeatureSet,
    bounds: &Bounds,
) -> Result<Vec<Term>, OracleError> {
    let mut universe: Vec<Term> = Vec::new();
    let cap = bounds.universe_cap;

    let push = |universe: &mut Vec<Term>, term: Term| -> Result<(), OracleError> {
        if universe.len() >= cap {
            return Err(OracleError::UniverseTooLarge { cap });
        }
        universe.push(term);
        Ok(())
    };

    // Depth 1: atoms, integers, and the empty list.
    for func in funcs.iter().filter(|f| f.arity == 0) {
        push(&mut universe, Term::atom(func.name.clone()))?;
    }
    if feats.uses_integers {
        let mut value = bounds.int_range.0.clone();
        while value <= bounds.int_range.1 {
            push(&mut universe, Term::IntLit(value.clone()))?;
            value += BigInt::one();
        }
    }
    if feats.uses_lists {
        push(&mut universe, Term::nil())?;
    }

    let compounds: Vec<&FunctionSig> = funcs.iter().filter(|f| f.arity > 0).collect();

    // `old_len` marks the boundary of terms with depth <= d-2; a new term
    // at depth d must use at least one component from the last level, so
    // each term is generated at exactly one level.
    let mut old_len = 0;
    for _depth in 2..=bounds.term_depth {
        let level_start = universe.len();
        let pool = universe.clone();

        let mut fresh: Vec<Term> = Vec::new();
        let mut overflow = false;
        for func in &compounds {
            let mut args = vec![0usize; func.arity];
            let full = generate_tuples(old_len, level_start, &mut args, 0, &mut |tuple| {
                if level_start + fresh.len() >= cap {
                    return false;
                }
                fresh.push(Term::Compound(
                    func.name.clone(),
                    tuple.iter().map(|&i| pool[i].clone()).collect(),
                ));
                true
            });
            if !full {
                overflow = true;
                break;
            }
        }
        if feats.uses_lists && !overflow {
            for len in 1..=bounds.max_list_len {
                let mut args = vec![0usize; len];
                let full = generate_tuples(old_len, level_start, &mut args, 0, &mut |tuple| {
                    if level_start + fresh.len() >= cap {
                        return false;
                    }
                    fresh.push(Term::ListTerm(
                        tuple.iter().map(|&i| pool[i].clone()).collect(),
                        None,
                    ));
                    true
                });
                if !full {
                    overflow = true;
                    break;
                }
            }
        }
        if overflow {
            return Err(OracleError::UniverseTooLarge { cap });
        }
        for term in fresh {
            push(&mut universe, term)?;
        }
        old_len = level_start;
    }

    Ok(universe)
}

/// Enumerate index tuples over `0..limit` that use at least one index in
/// `old_len..limit`. The `emit` callback returns `false` to abort; the
/// function returns `false` when aborted.
fn generate_tuples(
    old_len: usize,
    limit: usize,
    tuple: &mut [usize],
    position: usize,
    emit: &mut impl FnMut(&[usize]) -> bool,
) -> bool {
    if position == tuple.len() {
        if tuple.iter().any(|&i| i >= old_len) {
            return emit(tuple);
        }
        return true;
    }
    for index in 0..limit {
        tuple[position] = index;
        if !generate_tuples(old_len, limit, tuple, position + 1, emit) {
            return false;
        }
    }
    true
}

/// Depth of a ground term: atoms and integers are 1, functions and list
/// nodes add one level.
pub fn term_depth(term: &Term) -> u32 {
    match term {
        Term::Atom(_) | Term::IntLit(_) | Term::Var(_) => 1,
        Term::Compound(_, args) | Term::ArithExpr(_, args) => {
            1 + args.iter().map(term_depth).max().unwrap_or(0)
        }
        Term::ListTerm(elements, tail) => {
            let element_depth = elements.iter().map(term_depth).max().unwrap_or(0);
            let tail_depth = tail.as_deref().map(term_depth).unwrap_or(0);
            1 + element_depth.max(tail_depth)
        }
    }
}

/// Check that every integer, list length, and nesting level of a ground
/// term stays within bounds.
pub fn within_bounds(term: &Term, bounds: &Bounds) -> bool {
    fn ints_and_lists_ok(term: &Term, bounds: &Bounds) -> bool {
        match term {
            Term::IntLit(value) => bounds.contains_int(value),
            Term::Atom(_) | Term::Var(_) => true,
            Term::Compound(_, args) | Term::ArithExpr(_, args) => {
                args.iter().all(|a| ints_and_lists_ok(a, bounds))
            }
            Term::ListTerm(elements, tail) => {
                elements.len() <= bounds.max_list_len
                    && elements.iter().all(|e| ints_and_lists_ok(e, bounds))
                    && tail.as_deref().is_none_or(|t| ints_and_lists_ok(t, bounds))
            }
        }
    }
    term_depth(term) <= bounds.term_depth && ints_and_lists_ok(term, bounds)
}
