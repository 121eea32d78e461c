//! Invariants of operator families and related pairs, the vertical invariant
//! derivation, and extraction of weakly nonlinear invariants by elimination.
mod descend;
mod oracle;
mod pair;
mod source;

pub use descend::{descend, Descent, Relation};
pub use oracle::{oracle_1d, oracle_1d_pairs, OracleItem, OracleReport};
pub use pair::{family_invariant, family_values, nabla, pair_invariant, pair_invariants, PairInvariant, Seed};
pub use source::{CoeffSymbol, GenericFamily, PairContext, PairSource, MAX_JET_ORDER};
