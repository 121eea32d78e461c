//! Exact multivariate rational functions over the rationals.

mod coeff;
mod gcd;
mod parse;
mod poly;
mod rat;
mod varset;

pub use coeff::{q, q_frac, Coeff, Q};
pub use gcd::{content_in, gcd};
pub use parse::parse_expr;
pub use poly::{grlex_cmp, Mono, Poly};
pub use rat::{power_of_var, Rat};
pub use varset::VarSet;
