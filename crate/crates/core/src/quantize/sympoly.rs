use std::collections::BTreeMap;

use crate::diffop::{Frame, JetLinear, MultiIndex};
use crate::error::Result;
use crate::geometry::{Connection, SymTensor, Variance};
use crate::symexpr::{Rat, VarSet};

/// Coefficient ring of a [`SymPoly`]: functions, or linear forms in the jets
/// of an unknown function.
pub trait SymCoeff: Clone + std::fmt::Debug + PartialEq {
    fn zero_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn scale(&self, c: &Rat) -> Self;
    /// Total derivative `D_i` in the given frame.
    fn d(&self, frame: &Frame, i: usize) -> Result<Self>;
}

impl SymCoeff for Rat {
    fn zero_like(&self) -> Self {
        Rat::zero(self.vars())
    }
    fn is_zero(&self) -> bool {
        Rat::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn scale(&self, c: &Rat) -> Self {
        self * c
    }
    fn d(&self, frame: &Frame, i: usize) -> Result<Self> {
        frame.d(i, self)
    }
}

impl SymCoeff for JetLinear {
    fn zero_like(&self) -> Self {
        JetLinear::zero(self.vars())
    }
    fn is_zero(&self) -> bool {
        JetLinear::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        JetLinear::add(self, other)
    }
    fn scale(&self, c: &Rat) -> Self {
        JetLinear::scale(self, c)
    }
    fn d(&self, frame: &Frame, i: usize) -> Result<Self> {
        self.derive(frame, i)
    }
}

/// Polynomial `Σ c_γ w^γ` in fiber variables `w_1…w_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymPoly<C: SymCoeff = Rat> {
    dim: usize,
    terms: BTreeMap<MultiIndex, C>,
}

impl<C: SymCoeff> SymPoly<C> {
    pub fn zero(dim: usize) -> Self {
        SymPoly { dim, terms: BTreeMap::new() }
    }

    /// `c` in degree 0.
    pub fn constant(dim: usize, c: C) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(MultiIndex::zero(dim), c);
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &BTreeMap<MultiIndex, C> {
        &self.terms
    }

    pub fn coeff(&self, g: &MultiIndex) -> Option<&C> {
        self.terms.get(g)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Degrees of the nonzero homogeneous pieces, ascending.
    pub fn degrees(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.terms.keys().map(MultiIndex::order).collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    pub fn add_term(&mut self, g: MultiIndex, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&g) {
            Some(x) => {
                let s = x.add(&c);
                if !s.is_zero() {
                    self.terms.insert(g, s);
                }
            }
            None => {
                self.terms.insert(g, c);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut r = self.clone();
        for (g, c) in &other.terms {
            r.add_term(g.clone(), c.clone());
        }
        r
    }
}

impl SymPoly<Rat> {
    /// The fiber variable `w_k`.
    pub fn w(vars: &VarSet, dim: usize, k: usize) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(MultiIndex::unit(dim, k), Rat::one(vars));
        p
    }

    /// A homogeneous polynomial read as a symmetric form.
    pub fn to_form(&self, vars: &VarSet, k: usize) -> Result<SymTensor> {
        let comps = self.terms.iter().filter(|(g, _)| g.order() == k).map(|(g, c)| (g.clone(), c.clone()));
        SymTensor::new(vars, self.dim, k, Variance::Form, comps)
    }

    pub fn from_form(s: &SymTensor) -> Self {
        let mut p = Self::zero(s.dim());
        for (g, c) in s.comps() {
            p.add_term(g.clone(), c.clone());
        }
        p
    }
}

/// `d^s_∇ = Σ w_i D_i − Σ Γ^k_{ij} w_i w_j ∂/∂w_k`, raising degree by one.
pub fn sym_derivation<C: SymCoeff>(conn: &Connection, p: &SymPoly<C>) -> Result<SymPoly<C>> {
    let n = conn.dim();
    let frame = conn.frame();
    let mut r = SymPoly::zero(n);
    for (g, c) in &p.terms {
        for i in 0..n {
            r.add_term(g.plus(i), c.d(frame, i)?);
        }
        for k in 0..n {
            let e = g.get(k);
            if e == 0 {
                continue;
            }
            let lowered = g.minus(k).unwrap();
            let ck = c.scale(&Rat::int(frame.vars(), -(e as i64)));
            for i in 0..n {
                for j in 0..n {
                    let gamma = conn.get(k, i, j);
                    if !gamma.is_zero() {
                        r.add_term(lowered.plus(i).plus(j), ck.scale(gamma));
                    }
                }
            }
        }
    }
    Ok(r)
}
