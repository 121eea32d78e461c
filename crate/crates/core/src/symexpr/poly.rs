use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::coeff::{Coeff, Q};
use super::varset::VarSet;
use crate::error::Result;

/// Exponent vector over a [`VarSet`]. The derived order is lexicographic with
/// variable 0 most significant.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Mono(pub(crate) Box<[u16]>);

impl Mono {
    pub fn one(n: usize) -> Self {
        Mono(vec![0; n].into_boxed_slice())
    }

    pub fn var(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        Mono(e.into_boxed_slice())
    }

    pub fn from_exponents(e: &[u16]) -> Self {
        Mono(e.into())
    }

    pub fn exponents(&self) -> &[u16] {
        &self.0
    }

    pub fn exp(&self, i: usize) -> u16 {
        self.0[i]
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        Mono(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| a.checked_add(*b).expect("exponent overflow"))
                .collect(),
        )
    }

    pub fn divides(&self, other: &Mono) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Mono) -> Option<Mono> {
        if other.divides(self) {
            Some(Mono(self.0.iter().zip(other.0.iter()).map(|(a, b)| a - b).collect()))
        } else {
            None
        }
    }

    pub fn lcm(&self, other: &Mono) -> Mono {
        Mono(self.0.iter().zip(other.0.iter()).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn gcd(&self, other: &Mono) -> Mono {
        Mono(self.0.iter().zip(other.0.iter()).map(|(a, b)| *a.min(b)).collect())
    }

    pub fn is_coprime(&self, other: &Mono) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| *a == 0 || *b == 0)
    }

    pub(crate) fn with_exp(&self, i: usize, e: u16) -> Mono {
        let mut v = self.0.clone();
        v[i] = e;
        Mono(v)
    }

    pub(crate) fn padded(&self, n: usize) -> Mono {
        let mut v = self.0.to_vec();
        v.resize(n, 0);
        Mono(v.into_boxed_slice())
    }
}

/// Graded-lexicographic comparison with variable 0 most significant.
pub fn grlex_cmp(a: &Mono, b: &Mono) -> Ordering {
    a.degree().cmp(&b.degree()).then_with(|| a.cmp(b))
}

/// Sparse multivariate polynomial; zero coefficients are never stored.
#[derive(Clone, PartialEq)]
pub struct Poly<C = Q> {
    pub(crate) vars: VarSet,
    pub(crate) terms: BTreeMap<Mono, C>,
}

impl<C: Coeff> Poly<C> {
    pub fn zero(vars: &VarSet) -> Self {
        Poly { vars: vars.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(vars: &VarSet, c: C) -> Self {
        Self::monomial(vars, Mono::one(vars.len()), c)
    }

    pub fn monomial(vars: &VarSet, m: Mono, c: C) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { vars: vars.clone(), terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (Mono, C)>>(vars: &VarSet, it: I) -> Self {
        let mut p = Poly::zero(vars);
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.len() <= 1 && self.terms.keys().all(Mono::is_one)
    }

    pub fn constant_value(&self) -> Option<C> {
        if self.is_constant() {
            self.terms.values().next().cloned()
        } else {
            None
        }
    }

    pub fn nterms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Mono, &C)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Mono) -> Option<&C> {
        self.terms.get(m)
    }

    pub fn add_term(&mut self, m: Mono, c: C) {
        if c.is_zero() {
            return;
        }
        debug_assert_eq!(m.0.len(), self.vars.len());
        match self.terms.get_mut(&m) {
            Some(v) => {
                let s = v.add(&c);
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn degree_in(&self, v: usize) -> u16 {
        self.terms.keys().map(|m| m.0[v]).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Mono::degree).max().unwrap_or(0)
    }

    pub fn occurring(&self) -> Vec<bool> {
        let mut occ = vec![false; self.vars.len()];
        for m in self.terms.keys() {
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    occ[i] = true;
                }
            }
        }
        occ
    }

    pub fn involves(&self, v: usize) -> bool {
        self.terms.keys().any(|m| m.0[v] > 0)
    }

    fn check_vars(&self, other: &Self) {
        assert!(
            self.vars == other.vars,
            "variable sets differ: {:?} vs {:?}",
            self.vars,
            other.vars
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_vars(other);
        let (mut big, small) = if self.nterms() >= other.nterms() {
            (self.clone(), other)
        } else {
            (other.clone(), self)
        };
        for (m, c) in &small.terms {
            big.add_term(m.clone(), c.clone());
        }
        big
    }

    pub fn neg(&self) -> Self {
        Poly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check_vars(other);
        let mut r = self.clone();
        for (m, c) in &other.terms {
            r.add_term(m.clone(), c.neg());
        }
        r
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_vars(other);
        if self.is_zero() || other.is_zero() {
            return Poly::zero(&self.vars);
        }
        let mut r = Poly::zero(&self.vars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                r.add_term(m1.mul(m2), c1.mul(c2));
            }
        }
        r
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Poly::zero(&self.vars);
        }
        Poly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x.mul(c))).collect(),
        }
    }

    pub fn mul_term(&self, m: &Mono, c: &C) -> Self {
        if c.is_zero() {
            return Poly::zero(&self.vars);
        }
        Poly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(k, x)| (k.mul(m), x.mul(c))).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut result = match self.terms.values().next() {
            Some(c) => Poly::constant(&self.vars, c.one_like()),
            None => {
                return if e == 0 {
                    panic!("0^0 of a polynomial with no coefficient context")
                } else {
                    self.clone()
                }
            }
        };
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Leading term under an arbitrary monomial comparison.
    pub fn leading_by<F>(&self, cmp: F) -> Option<(&Mono, &C)>
    where
        F: Fn(&Mono, &Mono) -> Ordering,
    {
        self.terms.iter().max_by(|a, b| cmp(a.0, b.0))
    }

    /// Leading term in the lexicographic order (variable 0 highest).
    pub fn lex_leading(&self) -> Option<(&Mono, &C)> {
        self.terms.iter().next_back()
    }

    pub fn grlex_leading(&self) -> Option<(&Mono, &C)> {
        self.leading_by(grlex_cmp)
    }

    /// Splits into coefficients of powers of `v`; the coefficients have `v` removed.
    pub fn coefficients_in(&self, v: usize) -> Vec<Poly<C>> {
        let d = self.degree_in(v) as usize;
        let mut out = vec![Poly::zero(&self.vars); d + 1];
        for (m, c) in &self.terms {
            let k = m.0[v] as usize;
            out[k].terms.insert(m.with_exp(v, 0), c.clone());
        }
        out
    }

    /// Inverse of [`Poly::coefficients_in`].
    pub fn from_coefficients_in(vars: &VarSet, v: usize, coeffs: &[Poly<C>]) -> Self {
        let mut p = Poly::zero(vars);
        for (k, c) in coeffs.iter().enumerate() {
            for (m, x) in &c.terms {
                p.terms.insert(m.with_exp(v, k as u16), x.clone());
            }
        }
        p
    }

    /// Re-expresses the polynomial over `target`, matching variables by name.
    pub fn remap(&self, target: &VarSet) -> Result<Poly<C>> {
        if self.vars == *target {
            return Ok(self.clone());
        }
        if self.vars.is_prefix_of(target) {
            let n = target.len();
            return Ok(Poly {
                vars: target.clone(),
                terms: self.terms.iter().map(|(m, c)| (m.padded(n), c.clone())).collect(),
            });
        }
        let occ = self.occurring();
        let mut map = vec![usize::MAX; self.vars.len()];
        for (i, o) in occ.iter().enumerate() {
            if *o {
                map[i] = target.require(self.vars.name(i))?;
            }
        }
        let mut p = Poly::zero(target);
        for (m, c) in &self.terms {
            let mut e = vec![0u16; target.len()];
            for (i, &x) in m.0.iter().enumerate() {
                if x > 0 {
                    e[map[i]] = x;
                }
            }
            p.add_term(Mono(e.into_boxed_slice()), c.clone());
        }
        Ok(p)
    }
}

impl Poly<Q> {
    pub fn one(vars: &VarSet) -> Self {
        Poly::constant(vars, Q::one())
    }

    pub fn from_int(vars: &VarSet, n: i64) -> Self {
        Poly::constant(vars, Q::from_integer(BigInt::from(n)))
    }

    pub fn var(vars: &VarSet, i: usize) -> Self {
        Poly::monomial(vars, Mono::var(vars.len(), i), Q::one())
    }

    pub fn derivative(&self, v: usize) -> Self {
        let mut p = Poly::zero(&self.vars);
        for (m, c) in &self.terms {
            let e = m.0[v];
            if e > 0 {
                p.terms
                    .insert(m.with_exp(v, e - 1), c * Q::from_integer(BigInt::from(e)));
            }
        }
        p
    }

    /// Exact quotient `self / d`, or `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        self.check_vars(d);
        let (dm, dc) = d.lex_leading().expect("division by zero polynomial");
        let (dm, dc) = (dm.clone(), dc.clone());
        if d.nterms() == 1 {
            let mut q = Poly::zero(&self.vars);
            for (m, c) in &self.terms {
                q.terms.insert(m.div(&dm)?, c / &dc);
            }
            return Some(q);
        }
        let mut r = self.clone();
        let mut q = Poly::zero(&self.vars);
        while let Some((rm, rc)) = r.lex_leading() {
            let m = rm.div(&dm)?;
            let c = rc / &dc;
            r = r.sub(&d.mul_term(&m, &c));
            q.terms.insert(m, c);
        }
        Some(q)
    }

    /// Positive rational `c` with `self / c` having coprime integer coefficients
    /// and a positive lex-leading coefficient.
    pub fn rational_content(&self) -> Q {
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        for c in self.terms.values() {
            num = num.gcd(c.numer());
            den = den.lcm(c.denom());
        }
        if num.is_zero() {
            return Q::one();
        }
        let mut r = Q::new(num, den);
        if let Some((_, lc)) = self.lex_leading() {
            if lc.is_negative() {
                r = -r;
            }
        }
        r
    }

    pub fn integer_primitive(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let c = self.rational_content();
        if One::is_one(&c) {
            self.clone()
        } else {
            self.scale(&c.recip())
        }
    }

    /// Evaluates with every variable bound to a rational number.
    pub fn eval(&self, point: &[Q]) -> Q {
        let mut acc = Q::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t *= num_traits::pow(point[i].clone(), e as usize);
                }
            }
            acc += t;
        }
        acc
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        use num_traits::ToPrimitive;
        let mut acc = 0.0;
        for (m, c) in &self.terms {
            let mut t = c.to_f64().unwrap_or(f64::NAN);
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t *= point[i].powi(e as i32);
                }
            }
            acc += t;
        }
        acc
    }
}

impl<C: Coeff> fmt::Display for Poly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut ordered: Vec<_> = self.terms.iter().collect();
        ordered.sort_by(|a, b| grlex_cmp(b.0, a.0));
        for (k, (m, c)) in ordered.into_iter().enumerate() {
            let term = render_term(&self.vars, m, c);
            if k == 0 {
                write!(f, "{term}")?;
            } else if let Some(rest) = term.strip_prefix('-') {
                write!(f, " - {rest}")?;
            } else {
                write!(f, " + {term}")?;
            }
        }
        Ok(())
    }
}

impl<C: Coeff> fmt::Debug for Poly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

pub(crate) fn render_mono(vars: &VarSet, m: &Mono) -> String {
    let mut parts = Vec::new();
    for (i, &e) in m.0.iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(vars.name(i).to_string()),
            _ => parts.push(format!("{}^{}", vars.name(i), e)),
        }
    }
    parts.join("*")
}

fn render_term<C: Coeff>(vars: &VarSet, m: &Mono, c: &C) -> String {
    if m.is_one() {
        return if c.is_compound() { format!("({})", c.render()) } else { c.render() };
    }
    let mono = render_mono(vars, m);
    if c.is_one() {
        return mono;
    }
    if c.neg().is_one() {
        return format!("-{mono}");
    }
    if c.is_compound() {
        format!("({})*{mono}", c.render())
    } else {
        format!("{}*{mono}", c.render())
    }
}
