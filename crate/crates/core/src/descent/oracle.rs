use std::fmt;

use crate::diffop::{LinDiffOp, MultiIndex};
use crate::error::{Error, Result};
use crate::geometry::symbol;
use crate::quantize::{quantize, Evaluator, InvariantSpec};
use crate::symexpr::{parse_expr, Rat, Q};

use super::source::{PairSource, MAX_JET_ORDER};

/// One printed closed form next to the value the pipeline computes.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleItem {
    pub name: String,
    pub printed: Rat,
    pub computed: Rat,
    /// Expected ratio `computed / printed` from the pairing normalization.
    pub factor: Q,
    pub agrees: bool,
}

impl OracleItem {
    fn new(name: &str, printed: Rat, computed: Rat, factor: u32) -> Self {
        let factor = Q::from_integer(factor.into());
        let agrees = printed.scale(&factor) == computed;
        OracleItem { name: name.into(), printed, computed, factor, agrees }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleReport {
    pub items: Vec<OracleItem>,
}

impl OracleReport {
    pub fn get(&self, name: &str) -> Option<&OracleItem> {
        self.items.iter().find(|i| i.name == name)
    }

    pub fn discrepancies(&self) -> Vec<&OracleItem> {
        self.items.iter().filter(|i| !i.agrees).collect()
    }
}

impl fmt::Display for OracleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in &self.items {
            let tag = if i.agrees { "equal" } else { "DIFFERENT" };
            let fac = if i.factor == Q::from_integer(1.into()) { String::new() } else { format!(" (factor {})", i.factor) };
            writeln!(f, "{}: {tag}{fac}", i.name)?;
            writeln!(f, "  printed:  {}", i.printed)?;
            writeln!(f, "  computed: {}", i.computed)?;
        }
        Ok(())
    }
}

/// The one-dimensional closed forms (connection, subsymbols, quantized
/// pieces, `I0…I3`) against the pipeline, for a concrete operator.
pub fn oracle_1d(op: &LinDiffOp) -> Result<OracleReport> {
    if op.dim() != 1 {
        return Err(Error::Invalid("the one-dimensional oracle needs a dim 1 operator".into()));
    }
    let fr = op.frame().clone();
    let c = |k: u8| op.coeff(&MultiIndex::new(vec![k]));
    let d = |e: &Rat| fr.d(0, e);
    let int = |n: i64| Rat::int(op.vars(), n);
    let (a3, a2, a1, a0) = (c(3), c(2), c(1), c(0));
    let a3p = d(&a3)?;
    let a3pp = d(&a3p)?;
    let a0p = d(&a0)?;
    let three_a3 = &int(3) * &a3;

    // printed first-order coefficient of the quantized σ₃
    let p = (&(&(&int(2) * &(&a3p * &a3p)) * &a3) + &(&(&int(3) * &a3p) - &(&a3pp * &a3))).checked_div(&(&int(9) * &a3))?;
    let q2 = &a2 - &a3p;
    let ratio = a3p.checked_div(&three_a3)?;
    let s1 = &(&a1 - &p) - &(&q2 * &ratio);

    let mut ev = Evaluator::new(op);
    let ts = ev.total_symbol()?.clone();
    let comp = |k: usize| ts.get(k).component(&MultiIndex::new(vec![k as u8]));
    let qs3 = quantize(ts.get(3), &ts.connection)?;
    let qs2 = quantize(ts.get(2), &ts.connection)?;
    let at = |o: &LinDiffOp, k: u8| o.coeff(&MultiIndex::new(vec![k]));
    let pair = |ev: &mut Evaluator, k: usize| ev.eval(&InvariantSpec::Pair(k, Box::new(InvariantSpec::I0)));

    let items = vec![
        OracleItem::new("Gamma", -ratio.clone(), ts.connection.get(0, 0, 0).clone(), 1),
        OracleItem::new("sigma2", q2.clone(), comp(2), 1),
        OracleItem::new("sigma1", s1.clone(), comp(1), 1),
        OracleItem::new("sigma0", a0.clone(), ts.sigma0(), 1),
        OracleItem::new("sigma3_hat[2]", a3p.clone(), at(&qs3, 2), 1),
        OracleItem::new("sigma3_hat[1]", p, at(&qs3, 1), 1),
        OracleItem::new("sigma2_hat[2]", q2.clone(), at(&qs2, 2), 1),
        OracleItem::new("sigma2_hat[1]", &q2 * &ratio, at(&qs2, 1), 1),
        OracleItem::new("I0", a0.clone(), ev.eval(&InvariantSpec::I0)?, 1),
        OracleItem::new("I1", &s1 * &a0p, pair(&mut ev, 1)?, 1),
        OracleItem::new("I2", &q2 * &(&a0p * &a0p), pair(&mut ev, 2)?, 2),
        OracleItem::new("I3", &a3 * &a0p.pow(3), pair(&mut ev, 3)?, 6),
    ];
    debug_assert_eq!(symbol(&qs3, 3), ts.get(3).clone());
    Ok(OracleReport { items })
}

/// The printed related-pair invariants `I0…I3` (with `f′ = f1`, `f″ = f2`)
/// against the pipeline on the generic one-dimensional family.
pub fn oracle_1d_pairs() -> Result<OracleReport> {
    let seeds: Vec<InvariantSpec> = (0..=3)
        .map(|k| if k == 0 { InvariantSpec::I0 } else { InvariantSpec::Pair(k, Box::new(InvariantSpec::I0)) })
        .collect();
    let src = PairSource::Generic(1);
    let mut found = None;
    for order in 2..=MAX_JET_ORDER {
        let ctx = src.context(order)?;
        let mut ev = Evaluator::new(&ctx.op);
        match seeds.iter().map(|s| ev.eval(s)).collect::<Result<Vec<_>>>() {
            Ok(v) => {
                found = Some((ctx, v));
                break;
            }
            Err(Error::JetOrderExceeded(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    let (ctx, vals) = found.ok_or_else(|| Error::JetOrderExceeded("related-pair oracle".into()))?;
    let v = ctx.frame.vars();
    let r = |s: &str| parse_expr(s, v);
    let d3 = "(a3_x + a3_y*f1)";
    let d0 = "(a0_x + a0_y*f1)";
    let i1 = format!(
        "(a1 - (2*{d3}^2*a3 + 3*{d3})/(9*a3) - (a3_xx + 2*a3_xy*f1 + a3_yy*f1^2 + (a3_x + a3_y)*f2)*a3/(9*a3) \
         - (a2 - {d3})*{d3}/(3*a3))*{d0}"
    );
    let items = vec![
        OracleItem::new("pair I0", r("a0")?, vals[0].clone(), 1),
        OracleItem::new("pair I1", r(&i1)?, vals[1].clone(), 1),
        OracleItem::new("pair I2", r(&format!("(a2 - a3_x - a3_y*f1)*{d0}^2"))?, vals[2].clone(), 2),
        OracleItem::new("pair I3", r(&format!("a3*{d0}^3"))?, vals[3].clone(), 6),
    ];
    Ok(OracleReport { items })
}
