use crate::error::{Error, Result};
use crate::symexpr::{Poly, Rat, VarSet};

use super::multiindex::MultiIndex;

/// What a derivation does to one variable.
#[derive(Clone, Debug, PartialEq)]
pub enum Rule {
    Zero,
    Expr(Rat),
    /// The variable's derivative lies beyond the tracked jet order.
    Unavailable,
}

/// A variable set with commuting total derivatives `D_i` along the base
/// directions, plus a vertical derivation along the fiber.
///
/// Plain frames differentiate coefficients in x with every other variable
/// frozen; jet frames attach rules such as `D_x(y) = f1`, `D_x(f1) = f2`.
#[derive(Clone, Debug)]
pub struct Frame {
    vars: VarSet,
    base: Vec<usize>,
    total: Vec<Vec<Rule>>,
    vertical: Vec<Rule>,
    plain: bool,
}

impl Frame {
    /// Partial derivatives in the `base` variables; the vertical derivation is
    /// `∂/∂y` when a variable named `y` exists.
    pub fn plain(vars: &VarSet, base: &[usize]) -> Frame {
        let n = vars.len();
        let total = base
            .iter()
            .map(|&b| (0..n).map(|v| if v == b { Rule::Expr(Rat::one(vars)) } else { Rule::Zero }).collect())
            .collect();
        let y = vars.index("y");
        let vertical = (0..n).map(|v| if Some(v) == y { Rule::Expr(Rat::one(vars)) } else { Rule::Zero }).collect();
        Frame { vars: vars.clone(), base: base.to_vec(), total, vertical, plain: true }
    }

    pub fn new(vars: &VarSet, base: &[usize], total: Vec<Vec<Rule>>, vertical: Vec<Rule>) -> Result<Frame> {
        let n = vars.len();
        if total.len() != base.len() || total.iter().any(|r| r.len() != n) || vertical.len() != n {
            return Err(Error::Invalid("derivation rules do not match the variable set".into()));
        }
        for r in total.iter().flatten().chain(vertical.iter()) {
            if let Rule::Expr(e) = r {
                if e.vars() != vars {
                    return Err(Error::Invalid("derivation rule over a different variable set".into()));
                }
            }
        }
        Ok(Frame { vars: vars.clone(), base: base.to_vec(), total, vertical, plain: false })
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn dim(&self) -> usize {
        self.base.len()
    }

    pub fn base(&self) -> &[usize] {
        &self.base
    }

    pub fn base_names(&self) -> Vec<String> {
        self.base.iter().map(|&b| self.vars.name(b).to_string()).collect()
    }

    pub fn is_plain(&self) -> bool {
        self.plain
    }

    pub fn rule(&self, i: usize, v: usize) -> &Rule {
        &self.total[i][v]
    }

    pub fn vertical_rule(&self, v: usize) -> &Rule {
        &self.vertical[v]
    }

    /// Total derivative `D_i e`.
    pub fn d(&self, i: usize, e: &Rat) -> Result<Rat> {
        if self.plain {
            return Ok(e.derivative(self.base[i]));
        }
        apply_rules(&self.vars, &self.total[i], e)
    }

    /// `D^α e`.
    pub fn d_multi(&self, alpha: &MultiIndex, e: &Rat) -> Result<Rat> {
        let mut r = e.clone();
        for i in alpha.to_sequence() {
            r = self.d(i, &r)?;
        }
        Ok(r)
    }

    /// The vertical derivation (jets of the section held fixed).
    pub fn vertical(&self, e: &Rat) -> Result<Rat> {
        apply_rules(&self.vars, &self.vertical, e)
    }
}

/// Applies the derivation `Σ_v rules[v]·∂/∂v` to `e`.
pub(crate) fn apply_rules(vars: &VarSet, rules: &[Rule], e: &Rat) -> Result<Rat> {
    let occ = e.occurring();
    let mut active = Vec::new();
    for (v, o) in occ.iter().enumerate() {
        if !o {
            continue;
        }
        match &rules[v] {
            Rule::Zero => {}
            Rule::Expr(r) => active.push((v, r)),
            Rule::Unavailable => return Err(Error::JetOrderExceeded(vars.name(v).to_string())),
        }
    }
    if active.is_empty() {
        return Ok(Rat::zero(vars));
    }
    let polynomial_rules = active.iter().all(|(_, r)| r.is_polynomial());
    let (n, d) = (e.numer(), e.denom());
    if polynomial_rules {
        let dp = |p: &Poly| -> Poly {
            let mut acc = Poly::zero(vars);
            for (v, r) in &active {
                let pv = p.derivative(*v);
                if !pv.is_zero() {
                    let scale = r.denom().constant_value().expect("polynomial rule");
                    acc = acc.add(&pv.mul(r.numer()).scale(&scale.recip()));
                }
            }
            acc
        };
        let dn = dp(n);
        if d.is_constant() {
            return Rat::new(dn, d.clone());
        }
        let dd = dp(d);
        return Rat::new(dn.mul(d).sub(&n.mul(&dd)), d.mul(d));
    }
    let mut acc = Rat::zero(vars);
    for (v, r) in &active {
        acc = &acc + &(&e.derivative(*v) * *r);
    }
    Ok(acc)
}

/// Jet variables `f_β`, 1 ≤ |β| ≤ order, of a section `y = f(x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct JetVars {
    order: usize,
    vars: Vec<(MultiIndex, usize)>,
}

impl JetVars {
    pub fn order(&self) -> usize {
        self.order
    }

    /// `(β, variable index)` pairs in canonical multi-index order.
    pub fn iter(&self) -> impl Iterator<Item = &(MultiIndex, usize)> {
        self.vars.iter()
    }

    pub fn index_of(&self, beta: &MultiIndex) -> Option<usize> {
        self.vars.iter().find(|(b, _)| b == beta).map(|(_, v)| *v)
    }

    pub fn indices(&self) -> Vec<usize> {
        self.vars.iter().map(|(_, v)| *v).collect()
    }

    /// Conventional name: `f1, f2, …` in one dimension, `f_x1, f_x1x2, …` otherwise.
    pub fn name(base_names: &[String], beta: &MultiIndex) -> String {
        if base_names.len() == 1 {
            return format!("f{}", beta.order());
        }
        let mut s = String::from("f_");
        for i in beta.to_sequence() {
            s.push_str(&base_names[i]);
        }
        s
    }
}

/// Frame for related pairs: `vars` (containing the base variables and `y`)
/// extended by jet variables up to `order`, with `D_i(y) = f_{e_i}` and
/// `D_i(f_β) = f_{β+e_i}`. The vertical derivation is `∂/∂y` with jets fixed.
pub fn pair_frame(vars: &VarSet, base: &[usize], y: usize, order: usize) -> Result<(Frame, JetVars)> {
    let dim = base.len();
    let base_names: Vec<String> = base.iter().map(|&b| vars.name(b).to_string()).collect();
    let betas: Vec<MultiIndex> = (1..=order).flat_map(|k| MultiIndex::of_order(dim, k)).collect();
    let names: Vec<String> = betas.iter().map(|b| JetVars::name(&base_names, b)).collect();
    let all = vars.extend(names)?;
    let n0 = vars.len();
    let jets = JetVars { order, vars: betas.iter().cloned().enumerate().map(|(k, b)| (b, n0 + k)).collect() };
    let n = all.len();
    let mut total = Vec::with_capacity(dim);
    for (i, &b) in base.iter().enumerate() {
        let mut rules = vec![Rule::Zero; n];
        rules[b] = Rule::Expr(Rat::one(&all));
        rules[y] = Rule::Expr(Rat::var(&all, jets.index_of(&MultiIndex::unit(dim, i)).ok_or_else(|| {
            Error::Invalid("pair frames need jet order at least 1".into())
        })?));
        for (beta, v) in &jets.vars {
            rules[*v] = match jets.index_of(&beta.plus(i)) {
                Some(w) => Rule::Expr(Rat::var(&all, w)),
                None => Rule::Unavailable,
            };
        }
        total.push(rules);
    }
    let mut vertical = vec![Rule::Zero; n];
    vertical[y] = Rule::Expr(Rat::one(&all));
    Ok((Frame::new(&all, base, total, vertical)?, jets))
}
