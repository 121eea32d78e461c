use std::fmt;

use crate::diffop::{JetLinear, LinDiffOp, MultiIndex};
use crate::error::{Error, Result};
use crate::geometry::{symbol, symbol3, wagner_connection, Connection, SymTensor, Variance};
use crate::symexpr::{Rat, Q};

use super::sympoly::{sym_derivation, SymPoly};

/// `(d^s_∇)^k h` for a formal function `h`, as a polynomial in `w` with
/// jet-linear coefficients.
pub fn iterated_derivation(conn: &Connection, k: usize) -> Result<SymPoly<JetLinear>> {
    let n = conn.dim();
    let mut p = SymPoly::constant(n, JetLinear::h(conn.frame().vars(), n));
    for _ in 0..k {
        p = sym_derivation(conn, &p)?;
    }
    Ok(p)
}

/// `Q(α)(h) = (1/k!)⟨α, (d^s_∇)^k h⟩`.
pub fn quantize(alpha: &SymTensor, conn: &Connection) -> Result<LinDiffOp> {
    if alpha.variance() != Variance::Vector {
        return Err(Error::Invalid("only symmetric k-vectors are quantized".into()));
    }
    let k = alpha.degree();
    if k > 3 || alpha.dim() != conn.dim() {
        return Err(Error::Invalid(format!("cannot quantize a degree-{k} tensor in dimension {}", alpha.dim())));
    }
    let frame = conn.frame();
    let vars = frame.vars();
    let p = iterated_derivation(conn, k)?;
    let mut acc = JetLinear::zero(vars);
    let kfact: u64 = (1..=k as u64).product();
    for (g, a) in alpha.comps() {
        let Some(c) = p.coeff(g) else { continue };
        let w = Q::new(g.factorial().into(), kfact.into());
        acc = acc.add(&c.scale(&a.remap(vars)?.scale(&w)));
    }
    LinDiffOp::from_jet_linear(frame.clone(), &acc)
}

/// `σ₃ + σ₂ + σ₁ + σ₀` with `A = Q(σ₃) + Q(σ₂) + Q(σ₁) + σ₀`, all quantized
/// with the Wagner connection of `σ₃`.
#[derive(Clone, Debug, PartialEq)]
pub struct TotalSymbol {
    pub connection: Connection,
    /// `sigma[k]` has degree k; `sigma[0]` is the free term as a 0-tensor.
    pub sigma: [SymTensor; 4],
}

impl TotalSymbol {
    pub fn get(&self, k: usize) -> &SymTensor {
        &self.sigma[k]
    }

    pub fn sigma0(&self) -> Rat {
        self.sigma[0].component(&MultiIndex::zero(self.sigma[0].dim()))
    }

    /// `Q(σ₃) + Q(σ₂) + Q(σ₁) + σ₀`.
    pub fn reconstruct(&self) -> Result<LinDiffOp> {
        let frame = self.connection.frame().clone();
        let mut acc = LinDiffOp::zero(frame);
        for s in &self.sigma {
            acc = acc.add(&quantize(s, &self.connection)?);
        }
        Ok(acc)
    }
}

impl fmt::Display for TotalSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for k in (0..4).rev() {
            writeln!(f, "sigma{k} = {}", self.sigma[k])?;
        }
        Ok(())
    }
}

pub fn total_symbol(op: &LinDiffOp) -> Result<TotalSymbol> {
    total_symbol_with(op, &wagner_connection(op.frame(), &symbol3(op))?)
}

/// Peels with a given connection (which must come from the operator's `σ₃`
/// for the decomposition to be natural).
pub fn total_symbol_with(op: &LinDiffOp, conn: &Connection) -> Result<TotalSymbol> {
    let s3 = symbol3(op);
    let mut rest = op.sub(&quantize(&s3, conn)?);
    let mut lower = Vec::with_capacity(3);
    for k in (0..3).rev() {
        if rest.order() > k && !rest.is_zero() {
            return Err(Error::Invalid(format!("peeling left an order-{} remainder", rest.order())));
        }
        let s = symbol(&rest, k);
        rest = rest.sub(&quantize(&s, conn)?);
        lower.push(s);
    }
    debug_assert!(rest.is_zero());
    let [s2, s1, s0]: [SymTensor; 3] = lower.try_into().expect("three pieces");
    Ok(TotalSymbol { connection: conn.clone(), sigma: [s0, s1, s2, s3] })
}
