use std::fmt;

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::diffop::{LinDiffOp, OperatorFamily};
use crate::error::{Error, Result};
use crate::quantize::{Evaluator, InvariantSpec};
use crate::symexpr::{parse_expr, Rat, VarSet, Q};

/// Axis-aligned box `Π [lo_i, hi_i]` in the base coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Domain {
    pub bounds: Vec<(Q, Q)>,
}

impl Domain {
    pub fn new(bounds: Vec<(Q, Q)>) -> Result<Self> {
        if bounds.is_empty() || bounds.len() > 2 || bounds.iter().any(|(lo, hi)| lo > hi) {
            return Err(Error::Invalid("a domain needs 1 or 2 intervals with lo ≤ hi".into()));
        }
        Ok(Domain { bounds })
    }

    /// `[lo, hi]^dim`.
    pub fn cube(dim: usize, lo: Q, hi: Q) -> Self {
        Domain { bounds: vec![(lo, hi); dim] }
    }

    /// `lo1,hi1[,lo2,hi2]` with rational literals.
    pub fn parse(s: &str) -> Result<Self> {
        let vals = s
            .split(',')
            .map(|t| parse_q(t.trim()))
            .collect::<Result<Vec<Q>>>()?;
        if vals.len() % 2 != 0 {
            return Err(Error::Invalid(format!("domain `{s}` needs pairs of bounds")));
        }
        Domain::new(vals.chunks(2).map(|c| (c[0].clone(), c[1].clone())).collect())
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn contains(&self, x: &[Q]) -> bool {
        self.bounds.iter().zip(x).all(|((lo, hi), v)| lo <= v && v <= hi)
    }

    /// Intersection with another box, if nonempty.
    pub fn intersect(&self, other: &Domain) -> Option<Domain> {
        let b: Vec<(Q, Q)> = self
            .bounds
            .iter()
            .zip(&other.bounds)
            .map(|((a, b), (c, d))| (a.max(c).clone(), b.min(d).clone()))
            .collect();
        if b.iter().all(|(lo, hi)| lo <= hi) {
            Some(Domain { bounds: b })
        } else {
            None
        }
    }

    /// `m` evenly spaced values per axis (the center when `m = 1`), first axis slowest.
    pub fn grid(&self, m: usize) -> Vec<Vec<Q>> {
        let axis = |(lo, hi): &(Q, Q)| -> Vec<Q> {
            if m <= 1 {
                return vec![(lo + hi) / Q::from_integer(2.into())];
            }
            (0..m).map(|k| lo + (hi - lo) * Q::new(k.into(), (m - 1).into())).collect()
        };
        let mut pts: Vec<Vec<Q>> = vec![vec![]];
        for b in &self.bounds {
            let vals = axis(b);
            pts = pts.into_iter().flat_map(|p| vals.iter().map(move |v| [p.clone(), vec![v.clone()]].concat())).collect();
        }
        pts
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.bounds.iter().map(|(a, b)| format!("[{a}, {b}]")).collect();
        write!(f, "{}", parts.join("×"))
    }
}

/// A rational constant in the expression grammar, e.g. `-3/2`.
pub fn parse_q(t: &str) -> Result<Q> {
    let none = VarSet::new(Vec::<String>::new())?;
    parse_expr(t, &none)?
        .constant_value()
        .ok_or_else(|| Error::Invalid(format!("`{t}` is not a rational number")))
}

pub(crate) fn fmt_point(x: &[Q]) -> String {
    let parts: Vec<String> = x.iter().map(|v| v.to_string()).collect();
    format!("({})", parts.join(", "))
}

pub(crate) fn to_f64(q: &Q) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

pub(crate) fn from_f64(v: f64) -> Option<Q> {
    BigRational::from_float(v)
}

/// `x ↦ (z_1(A, y0)(x), …)` built from natural invariants of the frozen operator.
#[derive(Clone, Debug)]
pub struct Chart {
    pub specs: Vec<InvariantSpec>,
    pub y0: Q,
    pub domain: Domain,
    pub grid: usize,
    /// `A_{y0}` over the base variables.
    pub op: LinDiffOp,
    pub z: Vec<Rat>,
    /// `jac[i][j] = ∂z_i/∂x_j`.
    pub jac: Vec<Vec<Rat>>,
    pub det: Rat,
}

/// Values of `e` at a point of the base (given in base order).
pub(crate) fn eval_base(op: &LinDiffOp, e: &Rat, x: &[Q]) -> Result<Q> {
    let mut point = vec![Q::zero(); op.vars().len()];
    for (k, &b) in op.frame().base().iter().enumerate() {
        point[b] = x[k].clone();
    }
    e.eval_at(&point)
}

impl Chart {
    pub fn dim(&self) -> usize {
        self.z.len()
    }

    pub fn eval(&self, x: &[Q]) -> Result<Vec<Q>> {
        self.z.iter().map(|z| eval_base(&self.op, z, x)).collect()
    }

    pub fn eval_jacobian(&self, x: &[Q]) -> Result<Vec<Vec<Q>>> {
        self.jac.iter().map(|row| row.iter().map(|e| eval_base(&self.op, e, x)).collect()).collect()
    }
}

/// Builds the chart; fails only when its differentials are dependent everywhere.
pub fn build_chart(fam: &OperatorFamily, y0: &Q, specs: &[InvariantSpec], domain: &Domain, grid: usize) -> Result<Chart> {
    let dim = fam.dim();
    if specs.len() != dim || domain.dim() != dim {
        return Err(Error::Invalid(format!("a chart in dimension {dim} needs {dim} invariants and a {dim}-dimensional domain")));
    }
    let op = fam.at_y(y0)?;
    let mut ev = Evaluator::new(&op);
    let z = specs.iter().map(|s| ev.eval(s)).collect::<Result<Vec<_>>>()?;
    let base = op.frame().base().to_vec();
    let jac: Vec<Vec<Rat>> = z.iter().map(|zi| base.iter().map(|&b| zi.derivative(b)).collect()).collect();
    let det = if dim == 1 { jac[0][0].clone() } else { &(&jac[0][0] * &jac[1][1]) - &(&jac[0][1] * &jac[1][0]) };
    if det.is_zero() {
        return Err(Error::GeneralPosition(format!("the differentials of {} are dependent everywhere (y0 = {y0})", names(specs))));
    }
    Ok(Chart { specs: specs.to_vec(), y0: y0.clone(), domain: domain.clone(), grid, op, z, jac, det })
}

fn names(specs: &[InvariantSpec]) -> String {
    specs.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(", ")
}

impl Chart {
    /// `Ok(())` when the chart is defined with nonzero Jacobian at `x`.
    pub fn check_point(&self, x: &[Q]) -> Result<()> {
        let n = names(&self.specs);
        let undefined = || Error::Pole(format!("chart ({n}) is undefined at x = {} (y0 = {})", fmt_point(x), self.y0));
        match eval_base(&self.op, &self.det, x) {
            Ok(d) if d.is_zero() => {
                return Err(Error::GeneralPosition(format!(
                    "Jacobian of ({n}) vanishes at x = {} (y0 = {})",
                    fmt_point(x),
                    self.y0
                )))
            }
            Ok(_) => {}
            Err(_) => return Err(undefined()),
        }
        self.eval(x).map(|_| ()).map_err(|_| undefined())
    }
}

/// Builds the chart and checks the local-diffeomorphism condition on the
/// `grid × grid` sample of the domain.
pub fn natural_chart(fam: &OperatorFamily, y0: &Q, specs: &[InvariantSpec], domain: &Domain, grid: usize) -> Result<Chart> {
    let chart = build_chart(fam, y0, specs, domain, grid)?;
    for x in domain.grid(grid) {
        chart.check_point(&x)?;
    }
    Ok(chart)
}

/// One grid point of a signature table.
#[derive(Clone, Debug, PartialEq)]
pub struct SignatureRow {
    pub x: Vec<Q>,
    pub z: Vec<f64>,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Signature {
    pub columns: Vec<String>,
    pub rows: Vec<SignatureRow>,
    /// Grid points dropped because some value has a pole there.
    pub skipped: Vec<(Vec<Q>, String)>,
}

/// Symbolic values of a battery on the chart's operator, one per component.
pub fn battery_values(op: &LinDiffOp, specs: &[InvariantSpec]) -> Result<(Vec<String>, Vec<Rat>)> {
    let mut ev = Evaluator::new(op);
    let mut names = Vec::new();
    let mut vals = Vec::new();
    for s in specs {
        names.extend(s.component_names(op.dim()));
        vals.extend(ev.values(s)?);
    }
    Ok((names, vals))
}

/// Rows `(z(x), J_1(x), …)` over the chart's grid.
pub fn invariant_signature(chart: &Chart, extra: &[InvariantSpec]) -> Result<Signature> {
    let (columns, vals) = battery_values(&chart.op, extra)?;
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for x in chart.domain.grid(chart.grid) {
        let z = chart.eval(&x)?;
        match vals.iter().map(|v| eval_base(&chart.op, v, &x)).collect::<Result<Vec<_>>>() {
            Ok(v) => rows.push(SignatureRow { x, z: z.iter().map(to_f64).collect(), values: v.iter().map(to_f64).collect() }),
            Err(e) => skipped.push((x, e.to_string())),
        }
    }
    Ok(Signature { columns, rows, skipped })
}
