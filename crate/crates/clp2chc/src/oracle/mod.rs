//! Bounded Herbrand-model evaluator.
//!
//! The oracle computes the least set of ground facts derivable from a
//! program's facts and rules within finite bounds, and answers bounded
//! derivability for queries. It is the reference side of differential
//! testing: whenever the oracle derives a query within bounds, a correct
//! translation must make the corresponding script `unsat`. The converse
//! holds only at saturation over a universe covering the program, since
//! the bounded universe under-approximates the Herbrand universe.

pub mod eval;
pub mod universe;

pub use eval::{
    fixpoint, fixpoint_with, query_holds, query_holds_with, query_on, GroundFactSet, QueryAnswer,
};
pub use universe::enumerate_universe;

use num_bigint::BigInt;

/// Finite search bounds for the evaluator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bounds {
    /// Maximum term depth; atoms and integers have depth 1, each function
    /// or list nesting level adds 1.
    pub term_depth: u32,
    /// Closed interval of integers available in the universe and accepted
    /// in derived facts.
    pub int_range: (BigInt, BigInt),
    /// Maximum number of elements per list node.
    pub max_list_len: usize,
    /// Fixpoint iteration limit; hitting it leaves the result unsaturated.
    pub max_iterations: usize,
    /// Largest universe the evaluator is willing to materialize.
    pub universe_cap: usize,
}

impl Bounds {
    pub fn new(
        term_depth: u32,
        int_lo: impl Into<BigInt>,
        int_hi: impl Into<BigInt>,
        max_list_len: usize,
        max_iterations: usize,
    ) -> Bounds {
        let bounds = Bounds {
            term_depth,
            int_range: (int_lo.into(), int_hi.into()),
            max_list_len,
            max_iterations,
            universe_cap: 1_000_000,
        };
        assert!(
            bounds.int_range.0 <= bounds.int_range.1,
            "empty integer range"
        );
        assert!(term_depth >= 1, "term depth must be positive");
        assert!(max_iterations >= 1, "iteration bound must be positive");
        bounds
    }

    pub fn with_universe_cap(mut self, cap: usize) -> Bounds {
        self.universe_cap = cap;
        self
    }

    pub fn contains_int(&self, value: &BigInt) -> bool {
        &self.int_range.0 <= value && value <= &self.int_range.1
    }
}

impl Default for Bounds {
    fn default() -> Bounds {
        Bounds::new(4, 0, 64, 6, 500)
    }
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum OracleError {
    #[error("bounded universe exceeds {cap} terms")]
    UniverseTooLarge { cap: usize },
    #[error("`\\+` over predicate call {predicate} is not supported")]
    NegatedCall { predicate: String },
}
