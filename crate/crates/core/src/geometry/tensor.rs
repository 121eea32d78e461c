use std::collections::BTreeMap;
use std::fmt;

use crate::diffop::{LinDiffOp, MultiIndex};
use crate::error::{Error, Result};
use crate::symexpr::{Rat, VarSet, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variance {
    /// Symmetric k-vector `Σ S_α ∂^α` (written with `w̄`).
    Vector,
    /// Symmetric k-form `Σ S_α w^α`.
    Form,
}

/// Homogeneous symmetric tensor stored as polynomial coefficients `S_α`, `|α| = k`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymTensor {
    vars: VarSet,
    dim: usize,
    degree: usize,
    variance: Variance,
    comps: BTreeMap<MultiIndex, Rat>,
}

impl SymTensor {
    pub fn new<I>(vars: &VarSet, dim: usize, degree: usize, variance: Variance, comps: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, Rat)>,
    {
        let mut t = Self::zero(vars, dim, degree, variance);
        for (a, c) in comps {
            if a.dim() != dim || a.order() != degree {
                return Err(Error::Invalid(format!("component ({a}) does not belong to degree {degree}")));
            }
            let c = c.remap(vars)?;
            let s = &t.component(&a) + &c;
            if s.is_zero() {
                t.comps.remove(&a);
            } else {
                t.comps.insert(a, s);
            }
        }
        Ok(t)
    }

    pub fn zero(vars: &VarSet, dim: usize, degree: usize, variance: Variance) -> Self {
        SymTensor { vars: vars.clone(), dim, degree, variance, comps: BTreeMap::new() }
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn variance(&self) -> Variance {
        self.variance
    }

    pub fn comps(&self) -> &BTreeMap<MultiIndex, Rat> {
        &self.comps
    }

    pub fn component(&self, a: &MultiIndex) -> Rat {
        self.comps.get(a).cloned().unwrap_or_else(|| Rat::zero(&self.vars))
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    /// Entry of the fully symmetric array, `S^{i₁…i_k} = S_α / (k!/α!)`.
    pub fn array(&self, idx: &[usize]) -> Rat {
        let a = MultiIndex::from_sequence(self.dim, idx);
        self.component(&a).scale(&Q::new(1.into(), a.multinomial().into()))
    }

    /// `(Σ θ_i w_i)^k`.
    pub fn power(theta: &Covector, k: usize) -> SymTensor {
        let dim = theta.dim();
        let vars = theta.vars();
        let comps = MultiIndex::of_order(dim, k).into_iter().map(|a| {
            let mut c = Rat::int(vars, a.multinomial() as i64);
            for (i, &e) in a.exponents().iter().enumerate() {
                c = &c * &theta.comps[i].pow(e as u32);
            }
            (a, c)
        });
        SymTensor::new(vars, dim, k, Variance::Form, comps).expect("valid components")
    }
}

impl fmt::Display for SymTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.comps.is_empty() {
            return write!(f, "0");
        }
        let sym = if self.variance == Variance::Vector { "d" } else { "w" };
        let mut first = true;
        for (a, c) in &self.comps {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            for (i, &e) in a.exponents().iter().enumerate() {
                if e > 0 {
                    write!(f, "*{sym}{}", i + 1)?;
                    if e > 1 {
                        write!(f, "^{e}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// A 1-form `Σ θ_i dx_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct Covector {
    vars: VarSet,
    comps: Vec<Rat>,
}

impl Covector {
    pub fn new(vars: &VarSet, comps: Vec<Rat>) -> Result<Self> {
        let comps = comps.iter().map(|c| c.remap(vars)).collect::<Result<Vec<_>>>()?;
        Ok(Covector { vars: vars.clone(), comps })
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn comps(&self) -> &[Rat] {
        &self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Rat::is_zero)
    }

    pub fn as_form(&self) -> SymTensor {
        SymTensor::power(self, 1)
    }
}

/// `⟨v, s⟩ = Σ α!·v_α·s_α`.
pub fn pairing(v: &SymTensor, s: &SymTensor) -> Result<Rat> {
    if v.degree != s.degree || v.dim != s.dim {
        return Err(Error::Invalid(format!(
            "pairing a degree-{} tensor with a degree-{} tensor",
            v.degree, s.degree
        )));
    }
    let mut acc = Rat::zero(&v.vars);
    for (a, c) in &v.comps {
        if let Some(d) = s.comps.get(a) {
            acc = &acc + &(c * d).scale(&a.factorial_q());
        }
    }
    Ok(acc)
}

/// Order-`k` part of the operator as a symmetric k-vector.
pub fn symbol(op: &LinDiffOp, k: usize) -> SymTensor {
    SymTensor::new(op.vars(), op.dim(), k, Variance::Vector, op.slice(k)).expect("operator slice")
}

pub fn symbol3(op: &LinDiffOp) -> SymTensor {
    symbol(op, 3)
}
