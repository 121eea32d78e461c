//! Symbols, discriminant classification, the Wagner connection, its curvature
//! and torsion form.
mod connection;
mod discriminant;
mod linsolve;
mod tensor;

pub use connection::{curvature, parallel_residual, torsion_form, wagner_connection, Connection, Curvature};
pub use discriminant::{classify, classify_at, discriminant, SymbolClass};
pub use linsolve::solve;
pub use tensor::{pairing, symbol, symbol3, Covector, SymTensor, Variance};
