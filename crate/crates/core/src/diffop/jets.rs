use std::collections::BTreeMap;

use crate::error::Result;
use crate::symexpr::{Rat, VarSet};

use super::frame::Frame;
use super::multiindex::MultiIndex;

/// Linear form `Σ c_β h_β` in formal derivatives `h_β` of an unknown function.
#[derive(Clone, Debug, PartialEq)]
pub struct JetLinear {
    vars: VarSet,
    terms: BTreeMap<MultiIndex, Rat>,
}

impl JetLinear {
    pub fn zero(vars: &VarSet) -> Self {
        JetLinear { vars: vars.clone(), terms: BTreeMap::new() }
    }

    /// The undifferentiated placeholder `h`.
    pub fn h(vars: &VarSet, dim: usize) -> Self {
        let mut j = Self::zero(vars);
        j.terms.insert(MultiIndex::zero(dim), Rat::one(vars));
        j
    }

    pub fn term(vars: &VarSet, beta: MultiIndex, c: Rat) -> Self {
        let mut j = Self::zero(vars);
        j.add_term(beta, c);
        j
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn terms(&self) -> &BTreeMap<MultiIndex, Rat> {
        &self.terms
    }

    pub fn coeff(&self, beta: &MultiIndex) -> Rat {
        self.terms.get(beta).cloned().unwrap_or_else(|| Rat::zero(&self.vars))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, beta: MultiIndex, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&beta) {
            Some(x) => {
                let s = &*x + &c;
                if s.is_zero() {
                    self.terms.remove(&beta);
                } else {
                    *x = s;
                }
            }
            None => {
                self.terms.insert(beta, c);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut r = self.clone();
        for (b, c) in &other.terms {
            r.add_term(b.clone(), c.clone());
        }
        r
    }

    pub fn scale(&self, c: &Rat) -> Self {
        let mut r = Self::zero(&self.vars);
        if c.is_zero() {
            return r;
        }
        for (b, x) in &self.terms {
            r.terms.insert(b.clone(), x * c);
        }
        r
    }

    /// `D_i` with `D_i h_β = h_{β+e_i}`.
    pub fn derive(&self, frame: &Frame, i: usize) -> Result<Self> {
        let vars = self.vars.clone();
        self.derive_with(frame, i, |b| vec![(b.plus(i), Rat::one(&vars))])
    }

    /// `D_i` with a caller-supplied rule for the placeholders.
    pub fn derive_with<F>(&self, frame: &Frame, i: usize, jet: F) -> Result<Self>
    where
        F: Fn(&MultiIndex) -> Vec<(MultiIndex, Rat)>,
    {
        let mut r = Self::zero(&self.vars);
        for (b, c) in &self.terms {
            r.add_term(b.clone(), frame.d(i, c)?);
            for (b2, k) in jet(b) {
                r.add_term(b2, c * &k);
            }
        }
        Ok(r)
    }
}
