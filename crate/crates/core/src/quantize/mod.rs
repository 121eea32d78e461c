//! The symmetric derivation of a connection, quantization of symbols,
//! total-symbol decomposition, and the battery of natural invariants.
mod invariants;
mod quantization;
mod sympoly;

pub use invariants::{box3, evaluate, tresse_solve, Evaluator, InvariantSpec};
pub use quantization::{iterated_derivation, quantize, total_symbol, total_symbol_with, TotalSymbol};
pub use sympoly::{sym_derivation, SymCoeff, SymPoly};
