//! Exact scalars, sparse vectors over ℕ-indexed coordinates, the dual
//! pairing, and the rational simplex solver everything else is built on.

mod lp;
mod rational;
mod sparse;

pub use lp::{lp_solve, Constraint, LpOutcome, LpProblem, Relation, Sense};
pub use rational::{ExtRational, ParseRationalError, Rational};
pub use sparse::{l1_norm, pair, sup_norm, union_support, SparseVec};

#[cfg(test)]
pub(crate) mod strategies {
    use proptest::prelude::*;

    use super::{Rational, SparseVec};

    pub(crate) fn arb_rational() -> impl Strategy<Value = Rational> {
        (-20i64..=20, 1i64..=9).prop_map(|(n, d)| Rational::new(n, d))
    }

    pub(crate) fn arb_sparse() -> impl Strategy<Value = SparseVec> {
        proptest::collection::vec((0usize..12, arb_rational()), 0..6)
            .prop_map(SparseVec::from_entries)
    }
}
