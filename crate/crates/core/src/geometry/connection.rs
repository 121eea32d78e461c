use std::fmt;
use std::sync::Arc;

use crate::diffop::{Frame, MultiIndex};
use crate::error::{Error, Result};
use crate::symexpr::Rat;

use super::linsolve::solve;
use super::tensor::{Covector, SymTensor};

/// Christoffel table with `∇_{∂_l} ∂_m = Σ_k Γ^k_{ml} ∂_k`: the direction of
/// differentiation is the second lower index. Indices are 0-based.
#[derive(Clone, Debug)]
pub struct Connection {
    frame: Arc<Frame>,
    gamma: Vec<Rat>,
}

impl PartialEq for Connection {
    fn eq(&self, other: &Self) -> bool {
        self.gamma == other.gamma
    }
}

impl Connection {
    pub fn zero(frame: &Arc<Frame>) -> Self {
        let n = frame.dim();
        Connection { frame: frame.clone(), gamma: vec![Rat::zero(frame.vars()); n * n * n] }
    }

    /// Table from `(k, i, j) ↦ Γ^k_{ij}` entries; unspecified entries are zero.
    pub fn from_entries<I>(frame: &Arc<Frame>, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = ((usize, usize, usize), Rat)>,
    {
        let mut c = Self::zero(frame);
        for ((k, i, j), g) in entries {
            c.set(k, i, j, g.remap(frame.vars())?);
        }
        Ok(c)
    }

    pub fn frame(&self) -> &Arc<Frame> {
        &self.frame
    }

    pub fn dim(&self) -> usize {
        self.frame.dim()
    }

    fn at(&self, k: usize, i: usize, j: usize) -> usize {
        let n = self.dim();
        (k * n + i) * n + j
    }

    /// `Γ^k_{ij}`.
    pub fn get(&self, k: usize, i: usize, j: usize) -> &Rat {
        &self.gamma[self.at(k, i, j)]
    }

    pub fn set(&mut self, k: usize, i: usize, j: usize, g: Rat) {
        let p = self.at(k, i, j);
        self.gamma[p] = g;
    }

    /// `((k, i, j), Γ^k_{ij})` in index order.
    pub fn entries(&self) -> Vec<((usize, usize, usize), &Rat)> {
        let n = self.dim();
        let mut out = Vec::new();
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    out.push(((k, i, j), self.get(k, i, j)));
                }
            }
        }
        out
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.dim();
        (0..n).all(|k| (0..n).all(|i| (0..n).all(|j| self.get(k, i, j) == self.get(k, j, i))))
    }
}

impl fmt::Display for Connection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for ((k, i, j), g) in self.entries() {
            writeln!(f, "G^{}_{}{} = {}", k + 1, i + 1, j + 1, g)?;
        }
        Ok(())
    }
}

/// Symmetric index triples `i ≤ j ≤ k`.
fn triples(n: usize) -> Vec<[usize; 3]> {
    MultiIndex::of_order(n, 3)
        .into_iter()
        .map(|a| {
            let s = a.to_sequence();
            [s[0], s[1], s[2]]
        })
        .collect()
}

/// The unique connection making the cubic symbol parallel, from
/// `D_l S^{ijk} + Γ^i_{ml}S^{mjk} + Γ^j_{ml}S^{imk} + Γ^k_{ml}S^{ijm} = 0`.
///
/// For each direction `l` the unknowns `Γ^·_{·l}` satisfy the same linear
/// system, so one elimination serves every `l`.
pub fn wagner_connection(frame: &Arc<Frame>, sigma: &SymTensor) -> Result<Connection> {
    let n = frame.dim();
    if sigma.degree() != 3 || sigma.dim() != n {
        return Err(Error::Invalid("the connection is built from a cubic symbol".into()));
    }
    let sigma = SymTensor::new(frame.vars(), n, 3, sigma.variance(), sigma.comps().clone())?;
    let s = |i: usize, j: usize, k: usize| sigma.array(&[i, j, k]);
    let rows = triples(n);
    let unknown = |p: usize, m: usize| p * n + m;
    let mut mat = vec![vec![Rat::zero(frame.vars()); n * n]; rows.len()];
    let mut rhs = vec![vec![Rat::zero(frame.vars()); n]; rows.len()];
    for (r, &[i, j, k]) in rows.iter().enumerate() {
        for m in 0..n {
            for (p, val) in [(i, s(m, j, k)), (j, s(i, m, k)), (k, s(i, j, m))] {
                let u = unknown(p, m);
                mat[r][u] = &mat[r][u] + &val;
            }
        }
        let sijk = s(i, j, k);
        for l in 0..n {
            rhs[r][l] = -frame.d(l, &sijk)?;
        }
    }
    let x = solve(&mat, &rhs)
        .ok_or_else(|| Error::DegenerateSymbol(format!("the parallelism system is singular for the symbol {sigma}")))?;
    let mut c = Connection::zero(frame);
    for p in 0..n {
        for m in 0..n {
            for l in 0..n {
                c.set(p, m, l, x[unknown(p, m)][l].clone());
            }
        }
    }
    Ok(c)
}

/// All components `∇_l S^{ijk}` (`i ≤ j ≤ k`); zero iff the symbol is parallel.
pub fn parallel_residual(conn: &Connection, sigma: &SymTensor) -> Result<Vec<Rat>> {
    let n = conn.dim();
    let frame = conn.frame();
    let sigma = SymTensor::new(frame.vars(), n, 3, sigma.variance(), sigma.comps().clone())?;
    let s = |i: usize, j: usize, k: usize| sigma.array(&[i, j, k]);
    let mut out = Vec::new();
    for l in 0..n {
        for &[i, j, k] in &triples(n) {
            let mut acc = frame.d(l, &s(i, j, k))?;
            for m in 0..n {
                acc = &acc + &(conn.get(i, m, l) * &s(m, j, k));
                acc = &acc + &(conn.get(j, m, l) * &s(i, m, k));
                acc = &acc + &(conn.get(k, m, l) * &s(i, j, m));
            }
            out.push(acc);
        }
    }
    Ok(out)
}

/// `R^k_{m,ij} = D_iΓ^k_{mj} − D_jΓ^k_{mi} + Σ_p (Γ^k_{pi}Γ^p_{mj} − Γ^k_{pj}Γ^p_{mi})`.
#[derive(Clone, Debug, PartialEq)]
pub struct Curvature {
    dim: usize,
    r: Vec<Rat>,
}

impl Curvature {
    pub fn get(&self, k: usize, m: usize, i: usize, j: usize) -> &Rat {
        let n = self.dim;
        &self.r[((k * n + m) * n + i) * n + j]
    }

    pub fn is_zero(&self) -> bool {
        self.r.iter().all(Rat::is_zero)
    }

    /// Nonzero components as `((k, m, i, j), value)`.
    pub fn nonzero(&self) -> Vec<((usize, usize, usize, usize), &Rat)> {
        let n = self.dim;
        let mut out = Vec::new();
        for k in 0..n {
            for m in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        let v = self.get(k, m, i, j);
                        if !v.is_zero() {
                            out.push(((k, m, i, j), v));
                        }
                    }
                }
            }
        }
        out
    }
}

pub fn curvature(conn: &Connection) -> Result<Curvature> {
    let n = conn.dim();
    let frame = conn.frame();
    let mut r = Vec::with_capacity(n.pow(4));
    for k in 0..n {
        for m in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut acc = &frame.d(i, conn.get(k, m, j))? - &frame.d(j, conn.get(k, m, i))?;
                    for p in 0..n {
                        acc = &acc + &(conn.get(k, p, i) * conn.get(p, m, j));
                        acc = &acc - &(conn.get(k, p, j) * conn.get(p, m, i));
                    }
                    r.push(acc);
                }
            }
        }
    }
    Ok(Curvature { dim: n, r })
}

/// `θ_j = Σ_k (Γ^k_{jk} − Γ^k_{kj})`.
pub fn torsion_form(conn: &Connection) -> Covector {
    let n = conn.dim();
    let vars = conn.frame().vars();
    let comps = (0..n)
        .map(|j| {
            let mut acc = Rat::zero(vars);
            for k in 0..n {
                acc = &acc + &(conn.get(k, j, k) - conn.get(k, k, j));
            }
            acc
        })
        .collect();
    Covector::new(vars, comps).expect("same variables")
}
