use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::symexpr::{gcd, Mono, Poly, Rat, VarSet};

use super::groebner::{buchberger, elimination_ideal};
use super::order::MonomialOrder;

/// How non-work variables enter the relation computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParamMode {
    /// Coefficients in the rational function field of the parameters.
    #[default]
    Field,
    /// Parameters adjoined as lowest-priority ring variables over ℚ.
    Variables,
}

/// Polynomial relations among rational maps, in fresh indeterminates `X0…XN`
/// with polynomial coefficients in the parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct RelationIdeal {
    /// `X0…XN` followed by the parameter names.
    vars: VarSet,
    count: usize,
    gens: Vec<Poly>,
}

impl RelationIdeal {
    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn num_maps(&self) -> usize {
        self.count
    }

    pub fn x_names(&self) -> &[String] {
        &self.vars.names()[..self.count]
    }

    pub fn params(&self) -> &[String] {
        &self.vars.names()[self.count..]
    }

    pub fn gens(&self) -> &[Poly] {
        &self.gens
    }

    pub fn is_zero(&self) -> bool {
        self.gens.is_empty()
    }

    /// Substitutes the maps (over their own variable set) for the `X`s.
    pub fn substitute_maps(&self, maps: &[Rat]) -> Result<Vec<Rat>> {
        let target = maps.first().map(|m| m.vars().clone()).ok_or(Error::Invalid("no maps".into()))?;
        let bindings: HashMap<usize, Rat> = maps.iter().cloned().enumerate().collect();
        self.gens
            .iter()
            .map(|g| Rat::from_poly(g.clone()).substitute(&bindings, &target))
            .collect()
    }
}

impl fmt::Display for RelationIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, g) in self.gens.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, ">")
    }
}

fn fresh(base: &str, taken: &[String]) -> String {
    let mut name = base.to_string();
    while taken.iter().any(|t| t == &name || t.starts_with(&name) && t[name.len()..].chars().all(|c| c.is_ascii_digit())) {
        name.push('_');
    }
    name
}

/// Relations among `maps` after eliminating the variables at indices `work`.
///
/// Every other occurring variable is a parameter. Zeros of denominators are
/// excluded by saturation with an auxiliary variable.
pub fn relations_ideal(maps: &[Rat], work: &[usize], mode: ParamMode) -> Result<RelationIdeal> {
    let v = match maps.first() {
        Some(m) => m.vars().clone(),
        None => return Err(Error::Invalid("relations of an empty list of maps".into())),
    };
    if maps.iter().any(|m| m.vars() != &v) {
        return Err(Error::Invalid("maps must share one variable set".into()));
    }
    let mut occ = vec![false; v.len()];
    for m in maps {
        for (i, o) in m.occurring().into_iter().enumerate() {
            occ[i] |= o;
        }
    }
    let params: Vec<usize> = (0..v.len()).filter(|i| occ[*i] && !work.contains(i)).collect();
    let pnames: Vec<String> = params.iter().map(|&i| v.name(i).to_string()).collect();
    let wnames: Vec<String> = work.iter().map(|&i| v.name(i).to_string()).collect();

    let xbase = fresh("X", v.names());
    let xnames: Vec<String> = (0..maps.len()).map(|i| format!("{xbase}{i}")).collect();
    let mut taken = v.names().to_vec();
    taken.extend(xnames.iter().cloned());
    let sname = fresh("s", &taken);
    let out_vars = VarSet::new(xnames.iter().chain(pnames.iter()).cloned())?;
    let nw = work.len();

    let gens = match mode {
        ParamMode::Field => {
            let pvars = VarSet::new(pnames.iter().cloned())?;
            let ring = VarSet::new(wnames.iter().cloned().chain([sname]).chain(xnames.iter().cloned()))?;
            let conv = |p: &Poly| -> Poly<Rat> {
                let mut out = Poly::zero(&ring);
                for (m, c) in p.terms() {
                    let mut e = vec![0u16; ring.len()];
                    for (k, &w) in work.iter().enumerate() {
                        e[k] = m.exp(w);
                    }
                    let pe: Vec<u16> = params.iter().map(|&i| m.exp(i)).collect();
                    let coef = Rat::from_poly(Poly::monomial(&pvars, Mono::from_exponents(&pe), c.clone()));
                    out.add_term(Mono::from_exponents(&e), coef);
                }
                out
            };
            let one = Rat::one(&pvars);
            let mut gens: Vec<Poly<Rat>> = Vec::new();
            for (i, m) in maps.iter().enumerate() {
                let x = Mono::var(ring.len(), nw + 1 + i);
                gens.push(conv(m.denom()).mul_term(&x, &one).sub(&conv(m.numer())));
            }
            let sat = saturation_product(maps, |d| work.iter().any(|&w| d.involves(w)));
            if let Some(d) = sat {
                let s = Mono::var(ring.len(), nw);
                gens.push(conv(&d).mul_term(&s, &one).sub(&Poly::constant(&ring, one.clone())));
            }
            let gb = buchberger(&gens, &MonomialOrder::lex());
            let drop: Vec<usize> = (0..=nw).collect();
            let kept = elimination_ideal(&gb, &drop)?;
            kept.iter().map(|g| clear_parameters(g, nw + 1, &out_vars, &pvars)).collect::<Result<Vec<_>>>()?
        }
        ParamMode::Variables => {
            let ring = VarSet::new(
                wnames.iter().cloned().chain([sname]).chain(xnames.iter().cloned()).chain(pnames.iter().cloned()),
            )?;
            let mut gens: Vec<Poly> = Vec::new();
            for (i, m) in maps.iter().enumerate() {
                let x = Poly::var(&ring, nw + 1 + i);
                gens.push(x.mul(&m.denom().remap(&ring)?).sub(&m.numer().remap(&ring)?));
            }
            if let Some(d) = saturation_product(maps, |d| !d.is_constant()) {
                let s = Poly::var(&ring, nw);
                gens.push(s.mul(&d.remap(&ring)?).sub(&Poly::one(&ring)));
            }
            let gb = buchberger(&gens, &MonomialOrder::lex());
            let drop: Vec<usize> = (0..=nw).collect();
            let kept = elimination_ideal(&gb, &drop)?;
            kept.iter().map(|g| Ok(g.remap(&out_vars)?.integer_primitive())).collect::<Result<Vec<_>>>()?
        }
    };
    Ok(RelationIdeal { vars: out_vars, count: maps.len(), gens })
}

fn saturation_product(maps: &[Rat], keep: impl Fn(&Poly) -> bool) -> Option<Poly> {
    let mut seen: Vec<&Poly> = Vec::new();
    for m in maps {
        let d = m.denom();
        if keep(d) && !seen.contains(&d) {
            seen.push(d);
        }
    }
    let mut it = seen.into_iter();
    let first = it.next()?.clone();
    Some(it.fold(first, |a, d| a.mul(d)))
}

/// Turns a polynomial in the `X`s (starting at ring index `x0`) with
/// coefficients in ℚ(P) into a primitive polynomial over ℚ[X, P].
fn clear_parameters(g: &Poly<Rat>, x0: usize, out: &VarSet, pvars: &VarSet) -> Result<Poly> {
    let mut lcm = Poly::one(pvars);
    for (_, c) in g.terms() {
        let d = c.denom();
        let h = gcd(&lcm, d);
        lcm = lcm.mul(&d.div_exact(&h).expect("gcd divides"));
    }
    let mut coeffs: Vec<(Mono, Poly)> = Vec::new();
    for (m, c) in g.terms() {
        let k = lcm.div_exact(c.denom()).expect("lcm is a multiple");
        coeffs.push((m.clone(), c.numer().mul(&k)));
    }
    let mut content = coeffs[0].1.clone();
    for (_, c) in &coeffs[1..] {
        content = gcd(&content, c);
    }
    let nx = out.len() - pvars.len();
    let mut p = Poly::zero(out);
    for (m, c) in coeffs {
        let c = c.div_exact(&content).expect("content divides");
        for (pm, q) in c.terms() {
            let mut e = vec![0u16; out.len()];
            for i in 0..nx {
                e[i] = m.exp(x0 + i);
            }
            e[nx..].copy_from_slice(pm.exponents());
            p.add_term(Mono::from_exponents(&e), q.clone());
        }
    }
    Ok(p.integer_primitive())
}
