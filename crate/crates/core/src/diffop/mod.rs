//! Linear third-order operators on one- and two-dimensional domains, operator
//! families over `M×ℝ`, derivation frames, coordinate changes, and file I/O.
mod diffeo;
mod frame;
mod io;
mod jets;
mod multiindex;
mod operator;

pub use diffeo::{pushforward, pushforward_family, Diffeo};
pub use frame::{pair_frame, Frame, JetVars, Rule};
pub use io::{Operator, OperatorFile};
pub use jets::JetLinear;
pub use multiindex::MultiIndex;
pub use operator::{convert_uform, from_uform, A1Form, LinDiffOp, OperatorFamily};
