use crate::error::{Error, Result};
use crate::symexpr::{Coeff, Mono, Poly, Q};

use super::order::MonomialOrder;

/// Reduced Gröbner basis: monic generators sorted by decreasing leading monomial.
#[derive(Debug, Clone, PartialEq)]
pub struct GroebnerBasis<C: Coeff = Q> {
    gens: Vec<Poly<C>>,
    order: MonomialOrder,
}

impl<C: Coeff> GroebnerBasis<C> {
    pub fn gens(&self) -> &[Poly<C>] {
        &self.gens
    }

    pub fn into_gens(self) -> Vec<Poly<C>> {
        self.gens
    }

    pub fn order(&self) -> &MonomialOrder {
        &self.order
    }

    /// True when the ideal is the whole ring.
    pub fn is_unit(&self) -> bool {
        self.gens.len() == 1 && self.gens[0].is_constant()
    }

    pub fn reduce(&self, p: &Poly<C>) -> Poly<C> {
        normal_form(p, &self.gens, &self.order)
    }

    pub fn contains(&self, p: &Poly<C>) -> bool {
        self.reduce(p).is_zero()
    }
}

pub(crate) fn leading<'a, C: Coeff>(p: &'a Poly<C>, order: &MonomialOrder) -> Option<(&'a Mono, &'a C)> {
    if order.is_natural_lex() {
        p.lex_leading()
    } else {
        p.leading_by(|a, b| order.cmp(a, b))
    }
}

fn monic<C: Coeff>(p: Poly<C>, order: &MonomialOrder) -> Poly<C> {
    match leading(&p, order) {
        Some((_, c)) if !c.is_one() => {
            let inv = c.inv();
            p.scale(&inv)
        }
        _ => p,
    }
}

/// Remainder of `p` on division by `basis`; each step uses the first basis
/// element whose leading monomial divides the current leading monomial.
pub fn normal_form<C: Coeff>(p: &Poly<C>, basis: &[Poly<C>], order: &MonomialOrder) -> Poly<C> {
    let lead: Vec<(Mono, C)> = basis
        .iter()
        .filter_map(|g| leading(g, order).map(|(m, c)| (m.clone(), c.clone())))
        .collect();
    let nonzero: Vec<&Poly<C>> = basis.iter().filter(|g| !g.is_zero()).collect();
    reduce_with(p.clone(), &nonzero, &lead, order)
}

fn reduce_with<C: Coeff>(mut p: Poly<C>, basis: &[&Poly<C>], lead: &[(Mono, C)], order: &MonomialOrder) -> Poly<C> {
    let mut rem = Poly::zero(p.vars());
    while let Some((m, c)) = leading(&p, order) {
        let (m, c) = (m.clone(), c.clone());
        match lead.iter().position(|(lm, _)| lm.divides(&m)) {
            Some(k) => {
                let (lm, lc) = &lead[k];
                let q = m.div(lm).expect("divisor");
                p = p.sub(&basis[k].mul_term(&q, &c.div(lc)));
            }
            None => {
                p = p.sub(&Poly::monomial(p.vars(), m.clone(), c.clone()));
                rem.add_term(m, c);
            }
        }
    }
    rem
}

struct Pair {
    i: usize,
    j: usize,
    lcm: Mono,
}

struct State<'o, C: Coeff> {
    order: &'o MonomialOrder,
    polys: Vec<Poly<C>>,
    lms: Vec<Mono>,
    active: Vec<usize>,
    pairs: Vec<Pair>,
}

impl<C: Coeff> State<'_, C> {
    fn reduce(&self, p: Poly<C>) -> Poly<C> {
        let basis: Vec<&Poly<C>> = self.active.iter().map(|&k| &self.polys[k]).collect();
        let lead: Vec<(Mono, C)> = self
            .active
            .iter()
            .map(|&k| (self.lms[k].clone(), leading(&self.polys[k], self.order).unwrap().1.clone()))
            .collect();
        reduce_with(p, &basis, &lead, self.order)
    }

    /// Adds a reduced nonzero polynomial, pruning pairs with the Gebauer–Möller criteria.
    fn insert(&mut self, h: Poly<C>) {
        let h = monic(h, self.order);
        let lh = leading(&h, self.order).unwrap().0.clone();
        let hi = self.polys.len();

        let cands: Vec<(usize, Mono)> = self.active.iter().map(|&g| (g, lh.lcm(&self.lms[g]))).collect();
        let mut kept: Vec<(usize, Mono)> = Vec::new();
        for (k, (g, l)) in cands.iter().enumerate() {
            let coprime = lh.is_coprime(&self.lms[*g]);
            let dominated = cands[k + 1..].iter().any(|(_, l2)| l2.divides(l))
                || kept.iter().any(|(_, l2)| l2.divides(l));
            if coprime || !dominated {
                kept.push((*g, l.clone()));
            }
        }
        let lms = &self.lms;
        self.pairs.retain(|p| {
            !(lh.divides(&p.lcm) && lh.lcm(&lms[p.i]) != p.lcm && lh.lcm(&lms[p.j]) != p.lcm)
        });
        for (g, l) in kept {
            if !lh.is_coprime(&self.lms[g]) {
                self.pairs.push(Pair { i: g, j: hi, lcm: l });
            }
        }
        self.active.retain(|&g| !lh.divides(&lms[g]));
        self.active.push(hi);
        self.polys.push(h);
        self.lms.push(lh);
    }

    /// Normal selection: the pair with the smallest lcm, ties broken by index.
    fn select(&mut self) -> Option<Pair> {
        let order = self.order;
        let k = (0..self.pairs.len()).min_by(|&a, &b| {
            let (p, q) = (&self.pairs[a], &self.pairs[b]);
            order.cmp(&p.lcm, &q.lcm).then((p.i, p.j).cmp(&(q.i, q.j)))
        })?;
        Some(self.pairs.swap_remove(k))
    }

    fn spoly(&self, p: &Pair) -> Poly<C> {
        let f = &self.polys[p.i];
        let g = &self.polys[p.j];
        let one = leading(f, self.order).unwrap().1.one_like();
        let a = f.mul_term(&p.lcm.div(&self.lms[p.i]).unwrap(), &one);
        let b = g.mul_term(&p.lcm.div(&self.lms[p.j]).unwrap(), &one);
        a.sub(&b)
    }
}

/// Reduced Gröbner basis of the ideal generated by `gens`.
pub fn buchberger<C: Coeff>(gens: &[Poly<C>], order: &MonomialOrder) -> GroebnerBasis<C> {
    let mut st = State { order, polys: Vec::new(), lms: Vec::new(), active: Vec::new(), pairs: Vec::new() };
    for g in gens {
        let h = st.reduce(g.clone());
        if h.is_zero() {
            continue;
        }
        if h.is_constant() {
            return unit(&h, order);
        }
        st.insert(h);
    }
    while let Some(p) = st.select() {
        let h = st.reduce(st.spoly(&p));
        if h.is_zero() {
            continue;
        }
        if h.is_constant() {
            return unit(&h, order);
        }
        st.insert(h);
    }

    // Active leading monomials are pairwise non-dividing; tail-reduce each against the rest.
    let basis: Vec<&Poly<C>> = st.active.iter().map(|&k| &st.polys[k]).collect();
    let lead: Vec<(Mono, C)> = st
        .active
        .iter()
        .map(|&k| (st.lms[k].clone(), leading(&st.polys[k], order).unwrap().1.clone()))
        .collect();
    let mut out: Vec<Poly<C>> = Vec::with_capacity(basis.len());
    for (k, g) in basis.iter().enumerate() {
        let (lm, lc) = &lead[k];
        let lt = Poly::monomial(g.vars(), lm.clone(), lc.clone());
        let others: Vec<&Poly<C>> = basis.iter().enumerate().filter(|(i, _)| *i != k).map(|(_, p)| *p).collect();
        let olead: Vec<(Mono, C)> = lead.iter().enumerate().filter(|(i, _)| *i != k).map(|(_, x)| x.clone()).collect();
        let tail = reduce_with(g.sub(&lt), &others, &olead, order);
        out.push(monic(lt.add(&tail), order));
    }
    out.sort_by(|a, b| order.cmp(leading(b, order).unwrap().0, leading(a, order).unwrap().0));
    GroebnerBasis { gens: out, order: order.clone() }
}

fn unit<C: Coeff>(h: &Poly<C>, order: &MonomialOrder) -> GroebnerBasis<C> {
    let c = h.constant_value().unwrap();
    GroebnerBasis { gens: vec![Poly::constant(h.vars(), c.one_like())], order: order.clone() }
}

/// Generators of the intersection of the ideal with the subring free of `drop`.
pub fn elimination_ideal<C: Coeff>(gb: &GroebnerBasis<C>, drop: &[usize]) -> Result<Vec<Poly<C>>> {
    let n = gb.gens.first().map_or(0, |g| g.vars().len());
    if n > 0 && !gb.order.is_elimination_order_for(drop, n) {
        return Err(Error::Invalid("elimination needs a lex order with the dropped block highest".into()));
    }
    Ok(gb
        .gens
        .iter()
        .filter(|g| drop.iter().all(|&v| !g.involves(v)))
        .cloned()
        .collect())
}
