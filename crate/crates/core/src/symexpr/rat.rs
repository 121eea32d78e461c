use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::coeff::Q;
use super::gcd::gcd;
use super::poly::{Mono, Poly};
use super::varset::VarSet;
use crate::error::{Error, Result};

/// Exact rational function over the rationals in canonical form: numerator and
/// denominator coprime, denominator with graded-lex leading coefficient 1.
#[derive(Clone, PartialEq)]
pub struct Rat {
    num: Poly,
    den: Poly,
}

impl Rat {
    pub fn new(num: Poly, den: Poly) -> Result<Rat> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        assert!(num.vars() == den.vars(), "numerator and denominator over different variables");
        if num.is_zero() {
            return Ok(Rat::zero(num.vars()));
        }
        let g = gcd(&num, &den);
        let (num, den) = if g.is_constant() {
            (num, den)
        } else {
            (num.div_exact(&g).expect("gcd divides"), den.div_exact(&g).expect("gcd divides"))
        };
        Ok(Rat::normalized(num, den))
    }

    /// Assumes `num` and `den` are already coprime.
    fn normalized(num: Poly, den: Poly) -> Rat {
        let lc = den.grlex_leading().expect("nonzero").1.clone();
        if lc.is_one() {
            Rat { num, den }
        } else {
            let inv = lc.recip();
            Rat { num: num.scale(&inv), den: den.scale(&inv) }
        }
    }

    pub fn from_poly(p: Poly) -> Rat {
        let vars = p.vars().clone();
        Rat { num: p, den: Poly::one(&vars) }
    }

    pub fn zero(vars: &VarSet) -> Rat {
        Rat { num: Poly::zero(vars), den: Poly::one(vars) }
    }

    pub fn one(vars: &VarSet) -> Rat {
        Rat::constant(vars, Q::one())
    }

    pub fn constant(vars: &VarSet, c: Q) -> Rat {
        Rat { num: Poly::constant(vars, c), den: Poly::one(vars) }
    }

    pub fn int(vars: &VarSet, n: i64) -> Rat {
        Rat::from_poly(Poly::from_int(vars, n))
    }

    pub fn var(vars: &VarSet, i: usize) -> Rat {
        Rat::from_poly(Poly::var(vars, i))
    }

    pub fn var_named(vars: &VarSet, name: &str) -> Result<Rat> {
        Ok(Rat::var(vars, vars.require(name)?))
    }

    pub fn vars(&self) -> &VarSet {
        self.num.vars()
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_constant() && self.num.constant_value().is_some_and(|c| c.is_one())
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    pub fn constant_value(&self) -> Option<Q> {
        if self.den.is_constant() {
            self.num.constant_value().or_else(|| self.num.is_zero().then(Q::zero))
        } else {
            None
        }
    }

    pub fn involves(&self, v: usize) -> bool {
        self.num.involves(v) || self.den.involves(v)
    }

    pub fn occurring(&self) -> Vec<bool> {
        let mut a = self.num.occurring();
        for (x, y) in a.iter_mut().zip(self.den.occurring()) {
            *x |= y;
        }
        a
    }

    /// Total number of stored terms; a rough size measure.
    pub fn size(&self) -> usize {
        self.num.nterms() + self.den.nterms()
    }

    pub fn recip(&self) -> Result<Rat> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Rat::normalized(self.den.clone(), self.num.clone()))
    }

    pub fn checked_div(&self, other: &Rat) -> Result<Rat> {
        Ok(self * &other.recip()?)
    }

    pub fn scale(&self, c: &Q) -> Rat {
        if c.is_zero() {
            return Rat::zero(self.vars());
        }
        Rat { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn pow(&self, e: u32) -> Rat {
        if e == 0 {
            return Rat::one(self.vars());
        }
        Rat { num: self.num.pow(e), den: self.den.pow(e) }
    }

    /// Exact partial derivative.
    pub fn derivative(&self, v: usize) -> Rat {
        let dn = self.num.derivative(v);
        if self.den.is_constant() {
            return Rat { num: dn, den: self.den.clone() };
        }
        let dd = self.den.derivative(v);
        if dd.is_zero() {
            return Rat::new(dn, self.den.clone()).expect("nonzero denominator");
        }
        // (n'd - nd')/d^2, cancel one factor of gcd(d, d') first
        let g = gcd(&self.den, &dd);
        let d_over_g = self.den.div_exact(&g).expect("gcd divides");
        let dd_over_g = dd.div_exact(&g).expect("gcd divides");
        let num = dn.mul(&d_over_g).sub(&self.num.mul(&dd_over_g));
        Rat::new(num, self.den.mul(&d_over_g)).expect("nonzero denominator")
    }

    /// Re-expresses over `target`, matching variables by name.
    pub fn remap(&self, target: &VarSet) -> Result<Rat> {
        if self.vars() == target {
            return Ok(self.clone());
        }
        let num = self.num.remap(target)?;
        let den = self.den.remap(target)?;
        if self.vars().is_prefix_of(target) {
            Ok(Rat { num, den })
        } else {
            Rat::new(num, den)
        }
    }

    /// Simultaneous substitution of variables (by index in `self.vars()`) with
    /// rational functions over `target`. Unbound variables are carried over by name.
    pub fn substitute(&self, bindings: &HashMap<usize, Rat>, target: &VarSet) -> Result<Rat> {
        let num = substitute_poly(&self.num, bindings, target)?;
        let den = substitute_poly(&self.den, bindings, target)?;
        let (nn, nd) = num;
        let (dn, dd) = den;
        if dn.is_zero() {
            return Err(Error::Pole(format!("denominator {} vanishes identically after substitution", self.den)));
        }
        let n = Rat::new(nn, nd)?;
        let d = Rat::new(dn, dd)?;
        n.checked_div(&d)
    }

    /// Convenience form of [`Rat::substitute`] keyed by variable name, staying over `self.vars()`.
    pub fn substitute_named(&self, bindings: &[(&str, Rat)]) -> Result<Rat> {
        let mut map = HashMap::new();
        for (name, r) in bindings {
            map.insert(self.vars().require(name)?, r.clone());
        }
        let target = self.vars().clone();
        self.substitute(&map, &target)
    }

    /// Exact value at a point giving a value for each variable of `vars()`.
    pub fn eval_at(&self, point: &[Q]) -> Result<Q> {
        let d = self.den.eval(point);
        if d.is_zero() {
            return Err(Error::Pole(format!("denominator {} vanishes at the point", self.den)));
        }
        Ok(self.num.eval(point) / d)
    }

    /// Exact value with variables bound by name; every occurring variable must be bound.
    pub fn eval_named(&self, point: &[(&str, Q)]) -> Result<Q> {
        let occ = self.occurring();
        let mut vals = vec![Q::zero(); self.vars().len()];
        let mut bound = vec![false; self.vars().len()];
        for (name, v) in point {
            if let Some(i) = self.vars().index(name) {
                vals[i] = v.clone();
                bound[i] = true;
            }
        }
        if let Some(i) = (0..occ.len()).find(|&i| occ[i] && !bound[i]) {
            return Err(Error::Invalid(format!("variable `{}` is not bound", self.vars().name(i))));
        }
        self.eval_at(&vals)
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        self.num.eval_f64(point) / self.den.eval_f64(point)
    }
}

/// Substitutes into a polynomial over a common denominator; returns (numerator, denominator).
fn substitute_poly(p: &Poly, bindings: &HashMap<usize, Rat>, target: &VarSet) -> Result<(Poly, Poly)> {
    let src = p.vars();
    let n = src.len();
    let mut maxdeg = vec![0u16; n];
    for (m, _) in p.terms() {
        for (i, &e) in m.exponents().iter().enumerate() {
            maxdeg[i] = maxdeg[i].max(e);
        }
    }
    let mut images: Vec<Option<(Poly, Poly)>> = vec![None; n];
    for i in 0..n {
        if maxdeg[i] == 0 {
            continue;
        }
        images[i] = Some(match bindings.get(&i) {
            Some(r) => {
                let r = r.remap(target)?;
                (r.num, r.den)
            }
            None => {
                let j = target.require(src.name(i))?;
                (Poly::var(target, j), Poly::one(target))
            }
        });
    }
    // powers cache
    let mut num_pows: Vec<Vec<Poly>> = vec![Vec::new(); n];
    let mut den_pows: Vec<Vec<Poly>> = vec![Vec::new(); n];
    for i in 0..n {
        if let Some((a, b)) = &images[i] {
            let d = maxdeg[i] as usize;
            let mut np = vec![Poly::one(target)];
            let mut dp = vec![Poly::one(target)];
            for k in 1..=d {
                np.push(np[k - 1].mul(a));
                dp.push(dp[k - 1].mul(b));
            }
            num_pows[i] = np;
            den_pows[i] = dp;
        }
    }
    let mut acc = Poly::zero(target);
    for (m, c) in p.terms() {
        let mut t = Poly::constant(target, c.clone());
        for i in 0..n {
            if maxdeg[i] == 0 {
                continue;
            }
            let e = m.exp(i) as usize;
            let d = maxdeg[i] as usize;
            if e > 0 {
                t = t.mul(&num_pows[i][e]);
            }
            if d > e && !den_pows[i][1].is_constant() {
                t = t.mul(&den_pows[i][d - e]);
            } else if d > e {
                t = t.scale(den_pows[i][d - e].constant_value().as_ref().expect("constant"));
            }
        }
        acc = acc.add(&t);
    }
    let mut den = Poly::one(target);
    for i in 0..n {
        if maxdeg[i] > 0 {
            den = den.mul(&den_pows[i][maxdeg[i] as usize]);
        }
    }
    Ok((acc, den))
}

fn combine_vars(a: &Rat, b: &Rat) -> Option<VarSet> {
    if a.vars() == b.vars() {
        None
    } else if a.vars().is_prefix_of(b.vars()) {
        Some(b.vars().clone())
    } else if b.vars().is_prefix_of(a.vars()) {
        Some(a.vars().clone())
    } else {
        panic!("incompatible variable sets {:?} and {:?}", a.vars(), b.vars())
    }
}

impl<'a> Add<&'a Rat> for &'a Rat {
    type Output = Rat;
    fn add(self, o: &'a Rat) -> Rat {
        if let Some(v) = combine_vars(self, o) {
            return &self.remap(&v).expect("prefix") + &o.remap(&v).expect("prefix");
        }
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            let num = self.num.add(&o.num);
            if self.den.is_constant() {
                return Rat { num, den: self.den.clone() };
            }
            return Rat::new(num, self.den.clone()).expect("nonzero");
        }
        if self.den.is_constant() && o.den.is_constant() {
            return Rat::from_poly(self.num.add(&o.num));
        }
        let g = gcd(&self.den, &o.den);
        let (a_rest, b_rest) = if g.is_constant() {
            (self.den.clone(), o.den.clone())
        } else {
            (self.den.div_exact(&g).expect("divides"), o.den.div_exact(&g).expect("divides"))
        };
        let num = self.num.mul(&b_rest).add(&o.num.mul(&a_rest));
        let den = self.den.mul(&b_rest);
        if g.is_constant() {
            // gcd(num, den) = 1 when the denominators are coprime and both inputs are reduced
            if num.is_zero() {
                return Rat::zero(self.vars());
            }
            return Rat::normalized(num, den);
        }
        Rat::new(num, den).expect("nonzero")
    }
}

impl<'a> Sub<&'a Rat> for &'a Rat {
    type Output = Rat;
    fn sub(self, o: &'a Rat) -> Rat {
        self + &(-o)
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat { num: self.num.neg(), den: self.den.clone() }
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        -&self
    }
}

impl<'a> Mul<&'a Rat> for &'a Rat {
    type Output = Rat;
    fn mul(self, o: &'a Rat) -> Rat {
        if let Some(v) = combine_vars(self, o) {
            return &self.remap(&v).expect("prefix") * &o.remap(&v).expect("prefix");
        }
        if self.is_zero() || o.is_zero() {
            return Rat::zero(self.vars());
        }
        if self.den.is_constant() && o.den.is_constant() {
            return Rat::from_poly(self.num.mul(&o.num));
        }
        let g1 = gcd(&self.num, &o.den);
        let g2 = gcd(&o.num, &self.den);
        let cut = |p: &Poly, g: &Poly| if g.is_constant() { p.clone() } else { p.div_exact(g).expect("divides") };
        let num = cut(&self.num, &g1).mul(&cut(&o.num, &g2));
        let den = cut(&self.den, &g2).mul(&cut(&o.den, &g1));
        Rat::normalized(num, den)
    }
}

impl<'a> Div<&'a Rat> for &'a Rat {
    type Output = Rat;
    /// Panics on division by zero; see [`Rat::checked_div`].
    fn div(self, o: &'a Rat) -> Rat {
        self.checked_div(o).expect("division by zero rational function")
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Rat> for Rat {
            type Output = Rat;
            fn $m(self, o: Rat) -> Rat {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a Rat> for Rat {
            type Output = Rat;
            fn $m(self, o: &'a Rat) -> Rat {
                (&self).$m(o)
            }
        }
        impl<'a> $tr<Rat> for &'a Rat {
            type Output = Rat;
            fn $m(self, o: Rat) -> Rat {
                self.$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl super::coeff::Coeff for Rat {
    fn is_zero(&self) -> bool {
        Rat::is_zero(self)
    }
    fn is_one(&self) -> bool {
        Rat::is_one(self)
    }
    fn one_like(&self) -> Self {
        Rat::one(self.vars())
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Self {
        self.recip().expect("inverse of zero")
    }
    fn render(&self) -> String {
        self.to_string()
    }
    fn is_compound(&self) -> bool {
        self.constant_value().is_none()
    }
    fn is_negative_literal(&self) -> bool {
        use num_traits::Signed;
        self.constant_value().is_some_and(|c| c.is_negative())
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_constant() {
            return write!(f, "{}", self.num);
        }
        let n = if self.num.nterms() > 1 || self.num.constant_value().is_some_and(|c| !c.is_integer()) {
            format!("({})", self.num)
        } else {
            self.num.to_string()
        };
        let single_factor = self.den.nterms() == 1
            && self
                .den
                .terms()
                .next()
                .is_some_and(|(m, _)| m.exponents().iter().filter(|&&e| e > 0).count() == 1);
        if single_factor {
            write!(f, "{n}/{}", self.den)
        } else {
            write!(f, "{n}/({})", self.den)
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Rat({self})")
    }
}

/// Builds the monomial `x_i^e` as a rational function.
pub fn power_of_var(vars: &VarSet, i: usize, e: u16) -> Rat {
    let mut ex = vec![0u16; vars.len()];
    ex[i] = e;
    Rat::from_poly(Poly::monomial(vars, Mono::from_exponents(&ex), Q::one()))
}
