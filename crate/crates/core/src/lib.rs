//! Natural differential invariants of third-order linear and weakly nonlinear
//! differential operators, and an equivalence test built on them.

pub mod error;
pub mod polyalg;
pub mod diffop;
pub mod geometry;
pub mod quantize;
pub mod descent;
pub mod equivalence;
#[cfg(test)]
mod testutil;
pub mod symexpr;

pub use error::{Error, Result};
pub use symexpr::{parse_expr, Poly, Rat, VarSet, Q};
