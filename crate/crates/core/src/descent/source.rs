use std::collections::HashMap;
use std::sync::Arc;

use crate::diffop::{pair_frame, Frame, JetVars, LinDiffOp, MultiIndex, OperatorFamily, Rule};
use crate::error::{Error, Result};
use crate::symexpr::{Rat, VarSet};

/// Highest jet order tried when escalating automatically.
pub const MAX_JET_ORDER: usize = 8;

/// Where the operator of a related pair comes from.
#[derive(Clone, Debug)]
pub enum PairSource {
    /// A concrete family `Σ c_α(x, y) ∂^α`.
    Concrete(OperatorFamily),
    /// The family with independent symbolic coefficients `a_k(x, y)` (see [`GenericFamily`]).
    Generic(usize),
}

/// The operator `A_f` of a related pair over a jet frame of a given order.
#[derive(Clone, Debug)]
pub struct PairContext {
    pub frame: Arc<Frame>,
    pub jets: JetVars,
    pub op: LinDiffOp,
    /// Coefficient-jet symbols of a generic family, empty otherwise.
    pub symbols: Vec<CoeffSymbol>,
}

impl PairSource {
    pub fn dim(&self) -> usize {
        match self {
            PairSource::Concrete(f) => f.dim(),
            PairSource::Generic(d) => *d,
        }
    }

    pub fn context(&self, order: usize) -> Result<PairContext> {
        match self {
            PairSource::Concrete(fam) => {
                let base = fam.operator().frame().base().to_vec();
                let (frame, jets) = pair_frame(fam.vars(), &base, fam.y_index(), order)?;
                let frame = Arc::new(frame);
                let op = fam.operator().with_frame(frame.clone())?;
                Ok(PairContext { frame, jets, op, symbols: Vec::new() })
            }
            PairSource::Generic(dim) => GenericFamily::new(*dim, order).map(|g| g.ctx),
        }
    }
}

/// `∂^β c_α` for a coefficient `c_α` of the family; `β` runs over the base
/// variables followed by `y`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoeffSymbol {
    pub alpha: MultiIndex,
    pub beta: MultiIndex,
    pub var: usize,
}

/// The related-pair operator with generic coefficients.
///
/// One dimension: base `x`, coefficients `a0…a3` with derivative symbols such
/// as `a3_x`, `a0_xy`. Two dimensions: base `x1, x2`, coefficient `c_α` named
/// `c21`, derivatives `c21_x1y`. Jets `f1, f2, …` (resp. `f_x1, …`) as in
/// [`pair_frame`].
#[derive(Clone, Debug)]
pub struct GenericFamily {
    pub ctx: PairContext,
}

fn coeff_name(dim: usize, alpha: &MultiIndex) -> String {
    if dim == 1 {
        format!("a{}", alpha.get(0))
    } else {
        format!("c{}{}", alpha.get(0), alpha.get(1))
    }
}

fn deriv_suffix(base_names: &[String], beta: &MultiIndex) -> String {
    if beta.is_zero() {
        return String::new();
    }
    let dim = base_names.len();
    let mut s = String::from("_");
    for i in beta.to_sequence() {
        s.push_str(if i < dim { &base_names[i] } else { "y" });
    }
    s
}

impl GenericFamily {
    pub fn new(dim: usize, order: usize) -> Result<Self> {
        if !(1..=2).contains(&dim) {
            return Err(Error::Invalid(format!("dimension {dim}")));
        }
        let base_names: Vec<String> =
            if dim == 1 { vec!["x".to_string()] } else { vec!["x1".to_string(), "x2".to_string()] };
        let mut names = base_names.clone();
        names.push("y".into());
        let pre = VarSet::new(names)?;
        let base: Vec<usize> = (0..dim).collect();
        let (jf, jets) = pair_frame(&pre, &base, dim, order)?;
        let mut sym_names = Vec::new();
        let mut symbols = Vec::new();
        let alphas = MultiIndex::up_to(dim, 3);
        let betas = MultiIndex::up_to(dim + 1, order);
        let n0 = jf.vars().len();
        for a in &alphas {
            for b in betas.iter().rev() {
                sym_names.push(format!("{}{}", coeff_name(dim, a), deriv_suffix(&base_names, b)));
                symbols.push(CoeffSymbol { alpha: a.clone(), beta: b.clone(), var: n0 + symbols.len() });
            }
        }
        let vars = jf.vars().extend(sym_names)?;
        let find = |a: &MultiIndex, b: &MultiIndex| symbols.iter().find(|s| &s.alpha == a && &s.beta == b).map(|s| s.var);
        let lift = |r: &Rule| match r {
            Rule::Expr(e) => Rule::Expr(e.remap(&vars).expect("extension")),
            other => other.clone(),
        };
        let mut total = Vec::with_capacity(dim);
        for i in 0..dim {
            let mut rules: Vec<Rule> = (0..n0).map(|v| lift(jf.rule(i, v))).collect();
            let fi = Rat::var(&vars, jets.index_of(&MultiIndex::unit(dim, i)).expect("order ≥ 1"));
            for s in &symbols {
                let r = match (find(&s.alpha, &s.beta.plus(i)), find(&s.alpha, &s.beta.plus(dim))) {
                    (Some(dx), Some(dy)) => Rule::Expr(&Rat::var(&vars, dx) + &(&fi * &Rat::var(&vars, dy))),
                    _ => Rule::Unavailable,
                };
                rules.push(r);
            }
            total.push(rules);
        }
        let mut vertical: Vec<Rule> = (0..n0).map(|v| lift(jf.vertical_rule(v))).collect();
        for s in &symbols {
            vertical.push(match find(&s.alpha, &s.beta.plus(dim)) {
                Some(dy) => Rule::Expr(Rat::var(&vars, dy)),
                None => Rule::Unavailable,
            });
        }
        let frame = Arc::new(Frame::new(&vars, &base, total, vertical)?);
        let zero = MultiIndex::zero(dim + 1);
        let coeffs = alphas.iter().map(|a| (a.clone(), Rat::var(&vars, find(a, &zero).unwrap())));
        let op = LinDiffOp::new(frame.clone(), coeffs)?;
        Ok(GenericFamily { ctx: PairContext { frame, jets, op, symbols } })
    }

    /// Replaces coefficient-jet symbols by the corresponding derivatives of a
    /// concrete family's coefficients. The result lives over `target`, which
    /// must contain the family's variables and any jet variable that occurs.
    pub fn specialize(ctx: &PairContext, e: &Rat, fam: &OperatorFamily, target: &VarSet) -> Result<Rat> {
        let dim = fam.dim();
        let fbase = fam.operator().frame().base_names();
        let occ = e.occurring();
        let mut bind = HashMap::new();
        for s in &ctx.symbols {
            if !occ[s.var] {
                continue;
            }
            let mut c = fam.operator().coeff(&s.alpha);
            for k in s.beta.to_sequence() {
                c = c.derivative(if k < dim { fam.operator().frame().base()[k] } else { fam.y_index() });
            }
            bind.insert(s.var, c.remap(target)?);
        }
        // base variables, y and jets are matched by name (base names may differ)
        for i in 0..dim {
            if occ[i] {
                bind.insert(i, Rat::var(target, target.require(&fbase[i])?));
            }
        }
        for (beta, v) in ctx.jets.iter() {
            if occ[*v] {
                bind.insert(*v, Rat::var(target, target.require(&JetVars::name(&fbase, beta))?));
            }
        }
        if occ[dim] {
            bind.insert(dim, Rat::var(target, target.require("y")?));
        }
        e.substitute(&bind, target)
    }
}
