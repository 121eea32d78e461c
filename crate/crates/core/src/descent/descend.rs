use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::polyalg::{relations_ideal, ParamMode, RelationIdeal};
use crate::symexpr::{Mono, Poly, Rat, VarSet};

use super::pair::PairInvariant;

/// One generator of the relation ideal, with its coefficients (as functions of
/// the parameters) divided by the leading one.
#[derive(Clone, Debug, PartialEq)]
pub struct Relation {
    pub poly: Poly,
    /// `(X-monomial, normalized coefficient)`, leading monomial first.
    pub coefficients: Vec<(Mono, Rat)>,
}

impl Relation {
    /// Normalized coefficients that are not constants: the invariants proper.
    pub fn invariants(&self) -> Vec<&Rat> {
        self.coefficients.iter().map(|(_, c)| c).filter(|c| c.constant_value().is_none()).collect()
    }
}

#[derive(Clone, Debug)]
pub struct Descent {
    pub ideal: RelationIdeal,
    /// Names of the eliminated jet variables.
    pub eliminated: Vec<String>,
    pub relations: Vec<Relation>,
    /// The parameters, over which the coefficients are expressed.
    pub params: VarSet,
}

impl Descent {
    /// Renders an X-monomial with the ideal's names, e.g. `X0^2*X1`.
    pub fn monomial_name(&self, m: &Mono) -> String {
        let names = self.ideal.x_names();
        let mut parts = Vec::new();
        for (i, n) in names.iter().enumerate() {
            match m.exp(i) {
                0 => {}
                1 => parts.push(n.clone()),
                e => parts.push(format!("{n}^{e}")),
            }
        }
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }

    /// All invariant coefficients in order of appearance.
    pub fn invariants(&self) -> Vec<&Rat> {
        self.relations.iter().flat_map(Relation::invariants).collect()
    }
}

impl fmt::Display for Descent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.relations {
            writeln!(f, "{} = 0", r.poly)?;
            for (m, c) in &r.coefficients {
                writeln!(f, "  [{}] {}", self.monomial_name(m), c)?;
            }
        }
        Ok(())
    }
}

/// Polynomial relations among seed invariants after eliminating the jet
/// variables (by default exactly those that occur), with coefficients in the
/// field of the remaining symbols.
pub fn descend(seeds: &[PairInvariant], eliminate: Option<&[usize]>) -> Result<Descent> {
    let first = seeds.first().ok_or_else(|| Error::Invalid("descent needs at least one seed".into()))?;
    let vars = first.value.vars().clone();
    let work: Vec<usize> = match eliminate {
        Some(w) => w.to_vec(),
        None => {
            let mut w: Vec<usize> = seeds.iter().flat_map(PairInvariant::occurring_jets).collect();
            w.sort_unstable();
            w.dedup();
            w
        }
    };
    let maps: Vec<Rat> = seeds.iter().map(|s| s.value.remap(&vars)).collect::<Result<_>>()?;
    let ideal = relations_ideal(&maps, &work, ParamMode::Field)?;
    if ideal.is_zero() {
        return Err(Error::NoRelations);
    }
    let count = ideal.num_maps();
    let params = VarSet::new(ideal.params().iter().cloned())?;
    let relations = ideal.gens().iter().map(|g| normalize(g, count, &params)).collect::<Result<_>>()?;
    Ok(Descent { eliminated: work.iter().map(|&w| vars.name(w).to_string()).collect(), ideal, relations, params })
}

fn normalize(g: &Poly, count: usize, params: &VarSet) -> Result<Relation> {
    let mut groups: BTreeMap<Vec<u16>, Poly> = BTreeMap::new();
    for (m, c) in g.terms() {
        let e = m.exponents();
        let pm = Mono::from_exponents(&e[count..]);
        groups.entry(e[..count].to_vec()).or_insert_with(|| Poly::zero(params)).add_term(pm, c.clone());
    }
    // lex with X0 > X1 > … : the largest exponent vector leads
    let lead = groups.iter().next_back().map(|(_, p)| Rat::from_poly(p.clone())).expect("nonzero generator");
    let mut coefficients = Vec::with_capacity(groups.len());
    for (e, p) in groups.into_iter().rev() {
        coefficients.push((Mono::from_exponents(&e), Rat::from_poly(p).checked_div(&lead)?));
    }
    Ok(Relation { poly: g.clone(), coefficients })
}
