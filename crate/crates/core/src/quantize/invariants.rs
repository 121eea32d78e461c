use std::collections::HashMap;
use std::fmt;

use crate::diffop::LinDiffOp;
use crate::error::{Error, Result};
use crate::geometry::{pairing, torsion_form, Covector, SymTensor};
use crate::symexpr::Rat;

use super::quantization::{total_symbol, TotalSymbol};

/// A named natural invariant of third-order operators.
///
/// Grammar (comma-separated in lists):
/// `I0` free term; `I1` torsion form paired with `σ₁`; `I2` = `BOX:I1`;
/// `BOX:<I>` the operator applied to `I`; `THETA:k` = `⟨σ_k, θ^k⟩`;
/// `PAIR:k:<I>` = `⟨σ_k, (dI)^k⟩`; `DA0:k` = `PAIR:k:I0`;
/// `TRESSE:<J>;<I>[,<I>]` the Tresse derivatives of `J` with respect to the
/// basis invariants (one per dimension, at most two are read), and
/// `TRESSE.m:…` its m-th component alone.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum InvariantSpec {
    I0,
    I1,
    Box(Box<InvariantSpec>),
    Theta(usize),
    Pair(usize, Box<InvariantSpec>),
    Tresse { j: Box<InvariantSpec>, basis: Vec<InvariantSpec>, component: Option<usize> },
}

impl InvariantSpec {
    pub fn parse(s: &str) -> Result<Self> {
        let mut p = Parser { s, pos: 0 };
        let spec = p.spec()?;
        if p.pos != s.len() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(spec)
    }

    /// Comma-separated list.
    pub fn parse_list(s: &str) -> Result<Vec<Self>> {
        let mut p = Parser { s, pos: 0 };
        let mut out = vec![p.spec()?];
        while p.eat(",") {
            out.push(p.spec()?);
        }
        if p.pos != s.len() {
            return Err(p.err("expected `,` or end of list"));
        }
        Ok(out)
    }

    /// Number of values the spec evaluates to (`dim` for an unselected Tresse spec).
    pub fn arity(&self, dim: usize) -> usize {
        match self {
            InvariantSpec::Tresse { component: None, .. } => dim,
            _ => 1,
        }
    }

    /// Names of the individual values, e.g. `TRESSE.1:I2;I1,I2`.
    pub fn component_names(&self, dim: usize) -> Vec<String> {
        match self {
            InvariantSpec::Tresse { j, basis, component: None } => (1..=dim)
                .map(|m| InvariantSpec::Tresse { j: j.clone(), basis: basis.clone(), component: Some(m) }.to_string())
                .collect(),
            _ => vec![self.to_string()],
        }
    }
}

impl fmt::Display for InvariantSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InvariantSpec::I0 => write!(f, "I0"),
            InvariantSpec::I1 => write!(f, "I1"),
            InvariantSpec::Box(i) => write!(f, "BOX:{i}"),
            InvariantSpec::Theta(k) => write!(f, "THETA:{k}"),
            InvariantSpec::Pair(k, i) if **i == InvariantSpec::I0 => write!(f, "DA0:{k}"),
            InvariantSpec::Pair(k, i) => write!(f, "PAIR:{k}:{i}"),
            InvariantSpec::Tresse { j, basis, component } => {
                write!(f, "TRESSE")?;
                if let Some(m) = component {
                    write!(f, ".{m}")?;
                }
                write!(f, ":{j};")?;
                for (n, b) in basis.iter().enumerate() {
                    if n > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{b}")?;
                }
                Ok(())
            }
        }
    }
}

struct Parser<'a> {
    s: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Syntax { pos: self.pos, msg: format!("{msg} in invariant `{}`", self.s) }
    }

    fn eat(&mut self, t: &str) -> bool {
        if self.s[self.pos..].starts_with(t) {
            self.pos += t.len();
            true
        } else {
            false
        }
    }

    fn degree(&mut self) -> Result<usize> {
        match self.s[self.pos..].chars().next() {
            Some(c @ '0'..='3') => {
                self.pos += 1;
                Ok(c as usize - '0' as usize)
            }
            _ => Err(self.err("expected a degree 0..3")),
        }
    }

    fn spec(&mut self) -> Result<InvariantSpec> {
        use InvariantSpec as S;
        if self.eat("BOX:") {
            return Ok(S::Box(Box::new(self.spec()?)));
        }
        if self.eat("THETA:") {
            return Ok(S::Theta(self.degree()?));
        }
        if self.eat("DA0:") {
            return Ok(S::Pair(self.degree()?, Box::new(S::I0)));
        }
        if self.eat("PAIR:") {
            let k = self.degree()?;
            if !self.eat(":") {
                return Err(self.err("expected `:`"));
            }
            return Ok(S::Pair(k, Box::new(self.spec()?)));
        }
        if self.eat("TRESSE") {
            let component = if self.eat(".") {
                match self.degree()? {
                    m @ 1..=2 => Some(m),
                    _ => return Err(self.err("component must be 1 or 2")),
                }
            } else {
                None
            };
            if !self.eat(":") {
                return Err(self.err("expected `:`"));
            }
            let j = Box::new(self.spec()?);
            if !self.eat(";") {
                return Err(self.err("expected `;`"));
            }
            let mut basis = vec![self.spec()?];
            let save = self.pos;
            if self.eat(",") {
                match self.spec() {
                    Ok(b) => basis.push(b),
                    Err(_) => self.pos = save,
                }
            }
            return Ok(S::Tresse { j, basis, component });
        }
        for (name, spec) in [("I0", S::I0), ("I1", S::I1), ("I2", S::Box(Box::new(S::I1)))] {
            if self.eat(name) {
                return Ok(spec);
            }
        }
        Err(self.err("unknown invariant"))
    }
}

/// Evaluates battery members on one operator, sharing the total symbol and
/// intermediate values.
pub struct Evaluator<'a> {
    op: &'a LinDiffOp,
    total: Option<TotalSymbol>,
    cache: HashMap<InvariantSpec, Vec<Rat>>,
}

impl<'a> Evaluator<'a> {
    pub fn new(op: &'a LinDiffOp) -> Self {
        Evaluator { op, total: None, cache: HashMap::new() }
    }

    pub fn operator(&self) -> &LinDiffOp {
        self.op
    }

    pub fn total_symbol(&mut self) -> Result<&TotalSymbol> {
        if self.total.is_none() {
            self.total = Some(total_symbol(self.op)?);
        }
        Ok(self.total.as_ref().unwrap())
    }

    /// Single-valued evaluation.
    pub fn eval(&mut self, spec: &InvariantSpec) -> Result<Rat> {
        let v = self.values(spec)?;
        if v.len() != 1 {
            return Err(Error::Invalid(format!("`{spec}` has {} components; select one with TRESSE.m", v.len())));
        }
        Ok(v.into_iter().next().unwrap())
    }

    /// All components.
    pub fn values(&mut self, spec: &InvariantSpec) -> Result<Vec<Rat>> {
        if let Some(v) = self.cache.get(spec) {
            return Ok(v.clone());
        }
        let v = self.compute(spec)?;
        self.cache.insert(spec.clone(), v.clone());
        Ok(v)
    }

    fn differential(&mut self, spec: &InvariantSpec) -> Result<Covector> {
        let i = self.eval(spec)?;
        let frame = self.op.frame();
        let comps = (0..self.op.dim()).map(|k| frame.d(k, &i)).collect::<Result<Vec<_>>>()?;
        Covector::new(self.op.vars(), comps)
    }

    fn paired(&mut self, k: usize, theta: &Covector) -> Result<Rat> {
        let sigma = self.total_symbol()?.get(k).clone();
        pairing(&sigma, &SymTensor::power(theta, k))
    }

    fn compute(&mut self, spec: &InvariantSpec) -> Result<Vec<Rat>> {
        use InvariantSpec as S;
        let v = match spec {
            S::I0 => self.op.free_term(),
            S::I1 => {
                let theta = torsion_form(&self.total_symbol()?.connection);
                self.paired(1, &theta)?
            }
            S::Box(i) => {
                let inner = self.eval(i)?;
                self.op.apply(&inner)?
            }
            S::Theta(k) => {
                let theta = torsion_form(&self.total_symbol()?.connection);
                self.paired(*k, &theta)?
            }
            S::Pair(k, i) => {
                let d = self.differential(i)?;
                self.paired(*k, &d)?
            }
            S::Tresse { j, basis, component } => {
                let all = self.tresse(j, basis)?;
                return Ok(match component {
                    Some(m) => vec![all[m - 1].clone()],
                    None => all,
                });
            }
        };
        Ok(vec![v])
    }

    fn tresse(&mut self, j: &InvariantSpec, basis: &[InvariantSpec]) -> Result<Vec<Rat>> {
        let n = self.op.dim();
        if basis.len() != n {
            return Err(Error::Invalid(format!("Tresse derivatives in dimension {n} need {n} basis invariants")));
        }
        let dj = self.differential(j)?;
        let cols = basis.iter().map(|b| self.differential(b)).collect::<Result<Vec<_>>>()?;
        tresse_solve(dj.comps(), &cols.iter().map(|c| c.comps().to_vec()).collect::<Vec<_>>())
    }
}

/// Solves `D_i J = Σ_m D_i I_m · T_m` by Cramer's rule (`cols[m][i] = D_i I_m`).
pub fn tresse_solve(dj: &[Rat], cols: &[Vec<Rat>]) -> Result<Vec<Rat>> {
    match cols.len() {
        1 => {
            let det = cols[0][0].clone();
            if det.is_zero() {
                return Err(Error::GeneralPosition("dI vanishes identically".into()));
            }
            Ok(vec![&dj[0] / &det])
        }
        2 => {
            let det = &(&cols[0][0] * &cols[1][1]) - &(&cols[1][0] * &cols[0][1]);
            if det.is_zero() {
                return Err(Error::GeneralPosition("dI1 ∧ dI2 vanishes identically (Jacobian 0)".into()));
            }
            let t1 = &(&dj[0] * &cols[1][1]) - &(&cols[1][0] * &dj[1]);
            let t2 = &(&cols[0][0] * &dj[1]) - &(&dj[0] * &cols[0][1]);
            Ok(vec![&t1 / &det, &t2 / &det])
        }
        n => Err(Error::Invalid(format!("Tresse derivatives in dimension {n}"))),
    }
}

/// One-shot evaluation of a single-valued spec.
pub fn evaluate(spec: &InvariantSpec, op: &LinDiffOp) -> Result<Rat> {
    Evaluator::new(op).eval(spec)
}

/// `□₃` on a section: the operator applied to `h`.
pub fn box3(op: &LinDiffOp, h: &Rat) -> Result<Rat> {
    op.apply(h)
}
