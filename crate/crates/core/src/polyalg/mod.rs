//! Monomial orders, multivariate division, reduced Gröbner bases, elimination,
//! and polynomial relations among rational maps.
mod groebner;
mod order;
mod relations;

pub use groebner::{buchberger, elimination_ideal, normal_form, GroebnerBasis};
pub use order::{MonomialOrder, OrderKind};
pub use relations::{relations_ideal, ParamMode, RelationIdeal};
