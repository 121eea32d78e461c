//! Fixed workloads shared by the benchmarks.

use tresse_core::descent::{PairSource, Seed};
use tresse_core::diffop::{LinDiffOp, MultiIndex, OperatorFamily};
use tresse_core::{parse_expr, Rat, VarSet};

fn coeffs(v: &VarSet, terms: &[(&[u8], &str)]) -> Vec<(MultiIndex, Rat)> {
    terms.iter().map(|(a, c)| (MultiIndex::new(a.to_vec()), parse_expr(c, v).unwrap())).collect()
}

/// A regular hyperbolic operator in the plane with lower-order terms.
pub fn plane_operator() -> LinDiffOp {
    let v = VarSet::new(["x1", "x2"]).unwrap();
    let c = coeffs(&v, &[(&[2, 1], "1 + x1"), (&[1, 2], "2 + x2^2"), (&[1, 1], "x1*x2"), (&[1, 0], "x2"), (&[0, 0], "x1^2 + x2")]);
    LinDiffOp::plain(&v, &[0, 1], c).unwrap()
}

/// An operator on a line.
pub fn line_operator() -> LinDiffOp {
    let v = VarSet::new(["x"]).unwrap();
    let c = coeffs(&v, &[(&[3], "x + 1"), (&[2], "x^2"), (&[1], "x"), (&[0], "x^3 + 1")]);
    LinDiffOp::plain(&v, &[0], c).unwrap()
}

/// A family `A_y` in the plane whose free term depends on `y`.
pub fn plane_family() -> OperatorFamily {
    let v = VarSet::new(["x1", "x2", "y"]).unwrap();
    let c = coeffs(&v, &[(&[2, 1], "x1"), (&[1, 2], "x2"), (&[1, 0], "1"), (&[0, 0], "x1*y")]);
    OperatorFamily::new(LinDiffOp::plain(&v, &[0, 1], c).unwrap()).unwrap()
}

/// The seeds and pair source of the descent on a line.
pub fn descent_inputs() -> (Vec<Seed>, PairSource) {
    (vec![Seed::parse("DA0:2").unwrap(), Seed::parse("DA0:3").unwrap()], PairSource::Generic(1))
}
