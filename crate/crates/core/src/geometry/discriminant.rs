use std::fmt;

use num_traits::{Signed, Zero};

use crate::diffop::MultiIndex;
use crate::error::{Error, Result};
use crate::symexpr::{q_frac, Rat, Q};

use super::tensor::SymTensor;

/// `Δ = 6a₁a₂a₃a₄ − 4(a₁a₃³ + a₄a₂³) + 3a₂²a₃² − a₁²a₄²` with
/// `a₁ = S₃₀, 3a₂ = S₂₁, 3a₃ = S₁₂, a₄ = S₀₃`.
pub fn discriminant(sigma: &SymTensor) -> Result<Rat> {
    if sigma.dim() != 2 || sigma.degree() != 3 {
        return Err(Error::Invalid("the discriminant is defined for cubic symbols in two variables".into()));
    }
    let c = |a: u8, b: u8| sigma.component(&MultiIndex::new(vec![a, b]));
    let third = q_frac(1, 3);
    let (a1, a2, a3, a4) = (c(3, 0), c(2, 1).scale(&third), c(1, 2).scale(&third), c(0, 3));
    let k = |n: i64| Rat::int(sigma.vars(), n);
    let t1 = &k(6) * &(&(&a1 * &a2) * &(&a3 * &a4));
    let t2 = &k(4) * &(&(&a1 * &a3.pow(3)) + &(&a4 * &a2.pow(3)));
    let t3 = &k(3) * &(&a2.pow(2) * &a3.pow(2));
    let t4 = &a1.pow(2) * &a4.pow(2);
    Ok(&(&(&t1 - &t2) + &t3) - &t4)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymbolClass {
    Hyperbolic,
    Ultrahyperbolic,
    Degenerate,
    /// Symbolic Δ that is nonzero but of varying sign.
    Regular,
}

impl fmt::Display for SymbolClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SymbolClass::Hyperbolic => "hyperbolic",
            SymbolClass::Ultrahyperbolic => "ultrahyperbolic",
            SymbolClass::Degenerate => "degenerate",
            SymbolClass::Regular => "regular",
        })
    }
}

fn by_sign(d: &Q) -> SymbolClass {
    if d.is_zero() {
        SymbolClass::Degenerate
    } else if d.is_positive() {
        SymbolClass::Hyperbolic
    } else {
        SymbolClass::Ultrahyperbolic
    }
}

/// Type at a point (values for every variable of the symbol).
pub fn classify_at(sigma: &SymTensor, point: &[Q]) -> Result<(SymbolClass, Q)> {
    let d = discriminant(sigma)?.eval_at(point)?;
    Ok((by_sign(&d), d))
}

/// Symbolic type: degenerate iff Δ is the zero function; a constant Δ fixes the sign.
pub fn classify(sigma: &SymTensor) -> Result<(SymbolClass, Rat)> {
    let d = discriminant(sigma)?;
    let class = match d.constant_value() {
        Some(c) => by_sign(&c),
        None => SymbolClass::Regular,
    };
    Ok((class, d))
}
