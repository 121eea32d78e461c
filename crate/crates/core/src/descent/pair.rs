use std::collections::HashMap;
use std::fmt;

use crate::diffop::OperatorFamily;
use crate::error::{Error, Result};
use crate::quantize::{Evaluator, InvariantSpec};
use crate::symexpr::Rat;

use super::source::{PairContext, PairSource, MAX_JET_ORDER};

/// An invariant of related pairs: a function of the base point, `y = f(x)`,
/// the jets of `f`, and the family's coefficients.
#[derive(Clone, Debug)]
pub struct PairInvariant {
    pub ctx: PairContext,
    pub value: Rat,
}

impl PartialEq for PairInvariant {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value
    }
}

impl fmt::Display for PairInvariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl PairInvariant {
    /// Jet variables that actually occur.
    pub fn occurring_jets(&self) -> Vec<usize> {
        let occ = self.value.occurring();
        self.ctx.jets.indices().into_iter().filter(|&v| occ[v]).collect()
    }

    /// Substitutes `y = f` and the jets of `f`; the result is over `f`'s variables
    /// (which must name the base variables).
    pub fn specialize_jets(&self, f: &Rat) -> Result<Rat> {
        let vars = self.value.vars();
        let names = self.ctx.frame.base_names();
        let target = f.vars();
        let mut bind = HashMap::new();
        let y = vars.require("y")?;
        bind.insert(y, f.clone());
        for (beta, v) in self.ctx.jets.iter() {
            let mut d = f.clone();
            for i in beta.to_sequence() {
                d = d.derivative(target.require(&names[i])?);
            }
            bind.insert(*v, d);
        }
        self.value.substitute(&bind, target)
    }
}

/// `Î(x, y)`: the invariant of the frozen operator `A_y`, with `y` a parameter.
pub fn family_invariant(spec: &InvariantSpec, fam: &OperatorFamily) -> Result<Rat> {
    Evaluator::new(fam.operator()).eval(spec)
}

/// All components of a (possibly multi-valued) spec on the frozen family.
pub fn family_values(spec: &InvariantSpec, fam: &OperatorFamily) -> Result<Vec<Rat>> {
    Evaluator::new(fam.operator()).values(spec)
}

/// The invariant evaluated on `A_f` over a jet frame of the given order.
pub fn pair_invariant(spec: &InvariantSpec, source: &PairSource, order: usize) -> Result<PairInvariant> {
    let ctx = source.context(order)?;
    let value = Evaluator::new(&ctx.op).eval(spec)?;
    Ok(PairInvariant { ctx, value })
}

/// `∇`: the vertical derivation `∂_y` (coefficients differentiated in `y`,
/// jets of `f` fixed).
pub fn nabla(p: &PairInvariant) -> Result<PairInvariant> {
    Ok(PairInvariant { ctx: p.ctx.clone(), value: p.ctx.frame.vertical(&p.value)? })
}

/// What to evaluate on a related pair: a battery member followed by `∇^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct Seed {
    pub spec: InvariantSpec,
    pub nabla: usize,
}

impl Seed {
    pub fn new(spec: InvariantSpec) -> Self {
        Seed { spec, nabla: 0 }
    }

    /// `∇^k` applied to `spec`.
    pub fn chain(spec: &InvariantSpec, k: usize) -> Vec<Seed> {
        (0..=k).map(|n| Seed { spec: spec.clone(), nabla: n }).collect()
    }

    /// `NABLA^k:<spec>` or the spec itself.
    pub fn parse(s: &str) -> Result<Seed> {
        let mut nabla = 0;
        let mut rest = s;
        while let Some(r) = rest.strip_prefix("NABLA:") {
            nabla += 1;
            rest = r;
        }
        Ok(Seed { spec: InvariantSpec::parse(rest)?, nabla })
    }
}

impl fmt::Display for Seed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for _ in 0..self.nabla {
            write!(f, "NABLA:")?;
        }
        write!(f, "{}", self.spec)
    }
}

/// Evaluates every seed over one common jet frame, raising the jet order until
/// all derivatives are available.
pub fn pair_invariants(seeds: &[Seed], source: &PairSource) -> Result<Vec<PairInvariant>> {
    let mut last = None;
    for order in 1..=MAX_JET_ORDER {
        let ctx = source.context(order)?;
        match eval_seeds(seeds, &ctx) {
            Ok(v) => return Ok(v),
            Err(e @ Error::JetOrderExceeded(_)) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap_or_else(|| Error::Invalid("no seeds".into())))
}

fn eval_seeds(seeds: &[Seed], ctx: &PairContext) -> Result<Vec<PairInvariant>> {
    let mut ev = Evaluator::new(&ctx.op);
    let mut out = Vec::with_capacity(seeds.len());
    for s in seeds {
        let mut p = PairInvariant { ctx: ctx.clone(), value: ev.eval(&s.spec)? };
        for _ in 0..s.nabla {
            p = nabla(&p)?;
        }
        out.push(p);
    }
    Ok(out)
}
