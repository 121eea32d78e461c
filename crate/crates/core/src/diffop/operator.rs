use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::symexpr::{Rat, VarSet, Q};

use super::frame::Frame;
use super::jets::JetLinear;
use super::multiindex::MultiIndex;

/// `A = Σ c_α ∂^α` with `|α| ≤ 3`, coefficients over the frame's variables.
#[derive(Clone, Debug)]
pub struct LinDiffOp {
    frame: Arc<Frame>,
    coeffs: BTreeMap<MultiIndex, Rat>,
}

impl PartialEq for LinDiffOp {
    fn eq(&self, other: &Self) -> bool {
        self.frame.vars() == other.frame.vars() && self.coeffs == other.coeffs
    }
}

impl LinDiffOp {
    pub fn new<I>(frame: Arc<Frame>, coeffs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, Rat)>,
    {
        let mut map: BTreeMap<MultiIndex, Rat> = BTreeMap::new();
        for (a, c) in coeffs {
            if a.dim() != frame.dim() {
                return Err(Error::Invalid(format!("multi-index ({a}) does not match dimension {}", frame.dim())));
            }
            if a.order() > 3 {
                return Err(Error::Invalid(format!("multi-index ({a}) has order above 3")));
            }
            let c = c.remap(frame.vars())?;
            let s = match map.remove(&a) {
                Some(x) => &x + &c,
                None => c,
            };
            if !s.is_zero() {
                map.insert(a, s);
            }
        }
        Ok(LinDiffOp { frame, coeffs: map })
    }

    /// Operator over a plain frame on `vars` with base variables `base`.
    pub fn plain<I>(vars: &VarSet, base: &[usize], coeffs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, Rat)>,
    {
        Self::new(Arc::new(Frame::plain(vars, base)), coeffs)
    }

    pub fn zero(frame: Arc<Frame>) -> Self {
        LinDiffOp { frame, coeffs: BTreeMap::new() }
    }

    pub fn frame(&self) -> &Arc<Frame> {
        &self.frame
    }

    pub fn vars(&self) -> &VarSet {
        self.frame.vars()
    }

    pub fn dim(&self) -> usize {
        self.frame.dim()
    }

    pub fn coeffs(&self) -> &BTreeMap<MultiIndex, Rat> {
        &self.coeffs
    }

    pub fn coeff(&self, a: &MultiIndex) -> Rat {
        self.coeffs.get(a).cloned().unwrap_or_else(|| Rat::zero(self.vars()))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Largest `|α|` with a nonzero coefficient (0 for the zero operator).
    pub fn order(&self) -> usize {
        self.coeffs.keys().map(MultiIndex::order).max().unwrap_or(0)
    }

    /// `A(1)`.
    pub fn free_term(&self) -> Rat {
        self.coeff(&MultiIndex::zero(self.dim()))
    }

    /// Coefficients of order exactly `k`.
    pub fn slice(&self, k: usize) -> BTreeMap<MultiIndex, Rat> {
        self.coeffs.iter().filter(|(a, _)| a.order() == k).map(|(a, c)| (a.clone(), c.clone())).collect()
    }

    fn check_same(&self, other: &Self) {
        assert!(self.vars() == other.vars(), "operators over different variable sets");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_same(other);
        let mut r = self.clone();
        for (a, c) in &other.coeffs {
            let s = &r.coeff(a) + c;
            if s.is_zero() {
                r.coeffs.remove(a);
            } else {
                r.coeffs.insert(a.clone(), s);
            }
        }
        r
    }

    pub fn neg(&self) -> Self {
        LinDiffOp { frame: self.frame.clone(), coeffs: self.coeffs.iter().map(|(a, c)| (a.clone(), -c)).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &Rat) -> Self {
        if k.is_zero() {
            return Self::zero(self.frame.clone());
        }
        LinDiffOp { frame: self.frame.clone(), coeffs: self.coeffs.iter().map(|(a, c)| (a.clone(), c * k)).collect() }
    }

    /// `Σ c_α D^α h` with the frame's total derivatives.
    pub fn apply(&self, h: &Rat) -> Result<Rat> {
        let h = h.remap(self.vars())?;
        let mut cache: HashMap<MultiIndex, Rat> = HashMap::new();
        cache.insert(MultiIndex::zero(self.dim()), h);
        let mut acc = Rat::zero(self.vars());
        for (a, c) in &self.coeffs {
            let d = derivative_cached(&self.frame, a, &mut cache)?;
            acc = &acc + &(c * &d);
        }
        Ok(acc)
    }

    /// The operator as a linear form in formal derivatives.
    pub fn to_jet_linear(&self) -> JetLinear {
        let mut j = JetLinear::zero(self.vars());
        for (a, c) in &self.coeffs {
            j.add_term(a.clone(), c.clone());
        }
        j
    }

    pub fn from_jet_linear(frame: Arc<Frame>, j: &JetLinear) -> Result<Self> {
        Self::new(frame, j.terms().iter().map(|(a, c)| (a.clone(), c.clone())))
    }

    /// Same coefficients over a frame whose variables extend the current ones.
    pub fn with_frame(&self, frame: Arc<Frame>) -> Result<Self> {
        Self::new(frame, self.coeffs.clone())
    }

    /// Applies `f` to every coefficient, producing an operator over `frame`.
    pub fn map_coeffs<F>(&self, frame: Arc<Frame>, f: F) -> Result<Self>
    where
        F: Fn(&Rat) -> Result<Rat>,
    {
        let mut out = Vec::with_capacity(self.coeffs.len());
        for (a, c) in &self.coeffs {
            out.push((a.clone(), f(c)?));
        }
        Self::new(frame, out)
    }
}

/// `D^α h`, memoized over `cache` (which must hold `h` at α = 0).
pub(crate) fn derivative_cached(frame: &Frame, a: &MultiIndex, cache: &mut HashMap<MultiIndex, Rat>) -> Result<Rat> {
    if let Some(r) = cache.get(a) {
        return Ok(r.clone());
    }
    let i = a.first_nonzero().expect("zero index is always cached");
    let parent = a.minus(i).unwrap();
    let p = derivative_cached(frame, &parent, cache)?;
    let r = frame.d(i, &p)?;
    cache.insert(a.clone(), r.clone());
    Ok(r)
}

/// Coefficients in the written form
/// `a1∂₁³ + 3a2∂₁²∂₂ + 3a3∂₁∂₂² + a4∂₂³ + b1∂₁² + 2b2∂₁∂₂ + b3∂₂² + c1∂₁ + c2∂₂ + a0`.
#[derive(Clone, Debug, PartialEq)]
pub struct A1Form {
    pub a1: Rat,
    pub a2: Rat,
    pub a3: Rat,
    pub a4: Rat,
    pub b1: Rat,
    pub b2: Rat,
    pub b3: Rat,
    pub c1: Rat,
    pub c2: Rat,
    pub a0: Rat,
}

fn mi(a: u8, b: u8) -> MultiIndex {
    MultiIndex::new(vec![a, b])
}

impl A1Form {
    pub fn to_op(&self, frame: Arc<Frame>) -> Result<LinDiffOp> {
        if frame.dim() != 2 {
            return Err(Error::Invalid("the written form is two-dimensional".into()));
        }
        let t = |r: &Rat, k: i64| r.scale(&Q::from_integer(k.into()));
        LinDiffOp::new(
            frame,
            [
                (mi(3, 0), self.a1.clone()),
                (mi(2, 1), t(&self.a2, 3)),
                (mi(1, 2), t(&self.a3, 3)),
                (mi(0, 3), self.a4.clone()),
                (mi(2, 0), self.b1.clone()),
                (mi(1, 1), t(&self.b2, 2)),
                (mi(0, 2), self.b3.clone()),
                (mi(1, 0), self.c1.clone()),
                (mi(0, 1), self.c2.clone()),
                (mi(0, 0), self.a0.clone()),
            ],
        )
    }

    pub fn from_op(op: &LinDiffOp) -> Result<Self> {
        if op.dim() != 2 {
            return Err(Error::Invalid("the written form is two-dimensional".into()));
        }
        let d = |r: Rat, k: i64| r.scale(&crate::symexpr::q_frac(1, k));
        Ok(A1Form {
            a1: op.coeff(&mi(3, 0)),
            a2: d(op.coeff(&mi(2, 1)), 3),
            a3: d(op.coeff(&mi(1, 2)), 3),
            a4: op.coeff(&mi(0, 3)),
            b1: op.coeff(&mi(2, 0)),
            b2: d(op.coeff(&mi(1, 1)), 2),
            b3: op.coeff(&mi(0, 2)),
            c1: op.coeff(&mi(1, 0)),
            c2: op.coeff(&mi(0, 1)),
            a0: op.coeff(&mi(0, 0)),
        })
    }
}

/// `u^α = α!·c_α/6`, the coefficients of `6 Σ u^α/α! ∂^α`.
pub fn convert_uform(op: &LinDiffOp) -> BTreeMap<MultiIndex, Rat> {
    op.coeffs()
        .iter()
        .map(|(a, c)| (a.clone(), c.scale(&(a.factorial_q() / Q::from_integer(6.into())))))
        .collect()
}

/// Inverse of [`convert_uform`]: `c_α = 6·u^α/α!`.
pub fn from_uform(frame: Arc<Frame>, u: &BTreeMap<MultiIndex, Rat>) -> Result<LinDiffOp> {
    LinDiffOp::new(
        frame,
        u.iter().map(|(a, c)| (a.clone(), c.scale(&(Q::from_integer(6.into()) / a.factorial_q())))),
    )
}

/// A y-parametrized operator `Σ c_α(x, y) ∂_x^α`; no `∂_y` terms exist.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorFamily {
    op: LinDiffOp,
    y: usize,
}

impl OperatorFamily {
    /// Wraps an operator over a plain frame whose variables contain `y` outside the base.
    pub fn new(op: LinDiffOp) -> Result<Self> {
        let y = op.vars().require("y")?;
        if op.frame().base().contains(&y) || !op.frame().is_plain() {
            return Err(Error::Invalid("a family needs a plain frame with y outside the base".into()));
        }
        Ok(OperatorFamily { op, y })
    }

    /// The operator with `y` frozen as a parameter.
    pub fn operator(&self) -> &LinDiffOp {
        &self.op
    }

    pub fn y_index(&self) -> usize {
        self.y
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn vars(&self) -> &VarSet {
        self.op.vars()
    }

    /// Variables of the restricted operators: everything except `y`.
    pub fn base_vars(&self) -> VarSet {
        let names: Vec<&String> = self.vars().names().iter().filter(|n| n.as_str() != "y").collect();
        VarSet::new(names.into_iter().cloned()).expect("subset of a valid variable set")
    }

    /// `A_f`: coefficients evaluated on the graph `y = f(x)`.
    pub fn restrict(&self, f: &Rat) -> Result<LinDiffOp> {
        let target = self.base_vars();
        let f = f.remap(&target)?;
        let mut bind = HashMap::new();
        bind.insert(self.y, f);
        let base: Vec<usize> = self.op.frame().base_names().iter().map(|n| target.index(n).unwrap()).collect();
        let frame = Arc::new(Frame::plain(&target, &base));
        self.op.map_coeffs(frame, |c| c.substitute(&bind, &target))
    }

    /// The frozen operator `A_{y0}`.
    pub fn at_y(&self, y0: &Q) -> Result<LinDiffOp> {
        self.restrict(&Rat::constant(&self.base_vars(), y0.clone()))
    }

    /// `A_w(f) = A_f(f)`.
    pub fn weakly_apply(&self, f: &Rat) -> Result<Rat> {
        let af = self.restrict(f)?;
        af.apply(&f.remap(af.vars())?)
    }

    /// `(Σ c_α ∂^α)` with `y` independent coefficients, seen as a family.
    pub fn from_operator(op: &LinDiffOp) -> Result<Self> {
        let vars = if op.vars().index("y").is_some() { op.vars().clone() } else { op.vars().extend(["y"])? };
        let base: Vec<usize> = op.frame().base().to_vec();
        Self::new(LinDiffOp::plain(&vars, &base, op.coeffs().clone())?)
    }
}
