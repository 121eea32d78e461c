use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::symexpr::{Rat, VarSet, Q};

use super::frame::Frame;
use super::jets::JetLinear;
use super::multiindex::MultiIndex;
use super::operator::{LinDiffOp, OperatorFamily};

/// A coordinate change `x ↦ φ(x)` given together with its exact inverse.
#[derive(Clone, Debug, PartialEq)]
pub struct Diffeo {
    vars: VarSet,
    forward: Vec<Rat>,
    inverse: Vec<Rat>,
}

impl Diffeo {
    /// Checks `φ(φ⁻¹(x)) = x`, `φ⁻¹(φ(x)) = x` and a nonzero Jacobian.
    pub fn new(vars: &VarSet, forward: Vec<Rat>, inverse: Vec<Rat>) -> Result<Self> {
        let n = vars.len();
        if forward.len() != n || inverse.len() != n {
            return Err(Error::Invalid(format!("a map of {n} variables needs {n} components each way")));
        }
        let forward = forward.iter().map(|r| r.remap(vars)).collect::<Result<Vec<_>>>()?;
        let inverse = inverse.iter().map(|r| r.remap(vars)).collect::<Result<Vec<_>>>()?;
        let phi = Diffeo { vars: vars.clone(), forward, inverse };
        for j in 0..n {
            let x = Rat::var(vars, j);
            if phi.compose_components(&phi.forward[j], &phi.inverse)? != x
                || phi.compose_components(&phi.inverse[j], &phi.forward)? != x
            {
                return Err(Error::Invalid(format!("component {} of the inverse does not invert the map", j + 1)));
            }
        }
        if phi.jacobian_det().is_zero() {
            return Err(Error::DegenerateSymbol("Jacobian of the coordinate change vanishes identically".into()));
        }
        Ok(phi)
    }

    pub fn identity(vars: &VarSet) -> Self {
        let id: Vec<Rat> = (0..vars.len()).map(|j| Rat::var(vars, j)).collect();
        Diffeo { vars: vars.clone(), forward: id.clone(), inverse: id }
    }

    /// `x ↦ x + c`.
    pub fn translation(vars: &VarSet, c: &[Q]) -> Self {
        let fw = (0..vars.len()).map(|j| &Rat::var(vars, j) + &Rat::constant(vars, c[j].clone())).collect();
        let inv = (0..vars.len()).map(|j| &Rat::var(vars, j) - &Rat::constant(vars, c[j].clone())).collect();
        Diffeo { vars: vars.clone(), forward: fw, inverse: inv }
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    pub fn forward(&self) -> &[Rat] {
        &self.forward
    }

    pub fn inverse(&self) -> &[Rat] {
        &self.inverse
    }

    pub fn inverted(&self) -> Diffeo {
        Diffeo { vars: self.vars.clone(), forward: self.inverse.clone(), inverse: self.forward.clone() }
    }

    fn compose_components(&self, e: &Rat, inner: &[Rat]) -> Result<Rat> {
        let bind: HashMap<usize, Rat> = inner.iter().cloned().enumerate().collect();
        e.substitute(&bind, &self.vars)
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &Diffeo) -> Result<Diffeo> {
        if self.vars != first.vars {
            return Err(Error::Invalid("composing maps over different variables".into()));
        }
        let fw = self.forward.iter().map(|c| self.compose_components(c, &first.forward)).collect::<Result<Vec<_>>>()?;
        let inv = first.inverse.iter().map(|c| self.compose_components(c, &self.inverse)).collect::<Result<Vec<_>>>()?;
        Ok(Diffeo { vars: self.vars.clone(), forward: fw, inverse: inv })
    }

    /// `J[i][j] = ∂φ^i/∂x_j`.
    pub fn jacobian(&self) -> Vec<Vec<Rat>> {
        self.forward.iter().map(|c| (0..self.dim()).map(|j| c.derivative(j)).collect()).collect()
    }

    pub fn jacobian_det(&self) -> Rat {
        let j = self.jacobian();
        match self.dim() {
            1 => j[0][0].clone(),
            2 => &(&j[0][0] * &j[1][1]) - &(&j[0][1] * &j[1][0]),
            _ => unreachable!("dimension 1 or 2"),
        }
    }

    pub fn apply_point(&self, x: &[Q]) -> Result<Vec<Q>> {
        self.forward.iter().map(|c| c.eval_at(x)).collect()
    }

    pub fn apply_inverse_point(&self, x: &[Q]) -> Result<Vec<Q>> {
        self.inverse.iter().map(|c| c.eval_at(x)).collect()
    }

    fn bindings(&self, target: &VarSet, comps: &[Rat]) -> Result<HashMap<usize, Rat>> {
        let mut bind = HashMap::new();
        for (j, c) in comps.iter().enumerate() {
            bind.insert(target.require(self.vars.name(j))?, c.remap(target)?);
        }
        Ok(bind)
    }

    /// `e ∘ φ`; `e` may carry variables beyond the base ones.
    pub fn pull(&self, e: &Rat) -> Result<Rat> {
        let bind = self.bindings(e.vars(), &self.forward)?;
        e.substitute(&bind, e.vars())
    }

    /// `e ∘ φ⁻¹`, the pushforward of a function.
    pub fn push(&self, e: &Rat) -> Result<Rat> {
        let bind = self.bindings(e.vars(), &self.inverse)?;
        e.substitute(&bind, e.vars())
    }
}

/// `φ_*A = φ_* ∘ A ∘ φ_*⁻¹`, i.e. `(φ_*A)(h) = A(h∘φ)∘φ⁻¹`.
pub fn pushforward(op: &LinDiffOp, phi: &Diffeo) -> Result<LinDiffOp> {
    let frame = op.frame();
    if !frame.is_plain() {
        return Err(Error::Invalid("pushforward needs an operator over a plain frame".into()));
    }
    if frame.base_names() != phi.vars.names() {
        return Err(Error::Invalid("coordinate change and operator use different base variables".into()));
    }
    let vars = op.vars();
    let dim = op.dim();
    // ∂_i φ^j over the operator's variables
    let jac: Vec<Vec<Rat>> = phi
        .jacobian()
        .into_iter()
        .map(|row| row.iter().map(|c| c.remap(vars)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let rule = |i: usize| {
        let jac = &jac;
        move |b: &MultiIndex| -> Vec<(MultiIndex, Rat)> {
            (0..dim).filter(|&j| !jac[j][i].is_zero()).map(|j| (b.plus(j), jac[j][i].clone())).collect()
        }
    };
    let mut derivs: HashMap<MultiIndex, JetLinear> = HashMap::new();
    derivs.insert(MultiIndex::zero(dim), JetLinear::h(vars, dim));
    for a in MultiIndex::up_to(dim, op.order()).into_iter().rev() {
        if a.is_zero() {
            continue;
        }
        let i = a.first_nonzero().unwrap();
        let parent = derivs[&a.minus(i).unwrap()].clone();
        derivs.insert(a, parent.derive_with(frame, i, rule(i))?);
    }
    let mut total = JetLinear::zero(vars);
    for (a, c) in op.coeffs() {
        total = total.add(&derivs[a].scale(c));
    }
    let out = total
        .terms()
        .iter()
        .map(|(b, c)| Ok((b.clone(), phi.push(c)?)))
        .collect::<Result<Vec<_>>>()?;
    LinDiffOp::new(Arc::new(Frame::plain(vars, frame.base())), out)
}

/// Transports a family by a diffeomorphism of the base; `y` rides along.
pub fn pushforward_family(fam: &OperatorFamily, phi: &Diffeo) -> Result<OperatorFamily> {
    OperatorFamily::new(pushforward(fam.operator(), phi)?)
}
