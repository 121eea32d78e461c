use crate::symexpr::{gcd, Poly, Rat};

/// Solves `M X = B` (square `M`, any number of right-hand columns) by
/// fraction-free Bareiss elimination with full pivoting. `None` if `M` is singular.
pub fn solve(m: &[Vec<Rat>], b: &[Vec<Rat>]) -> Option<Vec<Vec<Rat>>> {
    let n = m.len();
    if n == 0 {
        return Some(Vec::new());
    }
    let vars = m[0][0].vars().clone();
    let r = b.first().map_or(0, Vec::len);
    // clear denominators row by row
    let mut a: Vec<Vec<Poly>> = Vec::with_capacity(n);
    for i in 0..n {
        let row: Vec<&Rat> = m[i].iter().chain(b[i].iter()).collect();
        let mut l = Poly::one(&vars);
        for e in &row {
            let d = e.denom();
            let g = gcd(&l, d);
            l = l.mul(&d.div_exact(&g).expect("gcd divides"));
        }
        a.push(row.iter().map(|e| e.numer().mul(&l.div_exact(e.denom()).expect("lcm"))).collect());
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut prev = Poly::one(&vars);
    for k in 0..n {
        let mut best: Option<(usize, usize, usize)> = None;
        for i in k..n {
            for j in k..n {
                if !a[i][j].is_zero() {
                    let size = a[i][j].nterms();
                    if best.is_none_or(|(_, _, s)| size < s) {
                        best = Some((i, j, size));
                    }
                }
            }
        }
        let (pi, pj, _) = best?;
        a.swap(k, pi);
        if pj != k {
            for row in a.iter_mut() {
                row.swap(k, pj);
            }
            perm.swap(k, pj);
        }
        for i in k + 1..n {
            for j in k + 1..n + r {
                let t = a[k][k].mul(&a[i][j]).sub(&a[i][k].mul(&a[k][j]));
                a[i][j] = t.div_exact(&prev).expect("Bareiss division is exact");
            }
            a[i][k] = Poly::zero(&vars);
        }
        prev = a[k][k].clone();
    }
    let mut x = vec![vec![Rat::zero(&vars); r]; n];
    for c in 0..r {
        for k in (0..n).rev() {
            let mut acc = Rat::from_poly(a[k][n + c].clone());
            for j in k + 1..n {
                if !a[k][j].is_zero() {
                    acc = &acc - &(&Rat::from_poly(a[k][j].clone()) * &x[j][c]);
                }
            }
            x[k][c] = acc.checked_div(&Rat::from_poly(a[k][k].clone())).ok()?;
        }
    }
    let mut out = vec![Vec::new(); n];
    for (k, row) in x.into_iter().enumerate() {
        out[perm[k]] = row;
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::{parse_expr, VarSet};

    #[test]
    fn symbolic_system() {
        let v = VarSet::new(["a", "b"]).unwrap();
        let r = |s: &str| parse_expr(s, &v).unwrap();
        // [[0, a], [b, 1]] x = [[a], [b + 1]]  ⇒  x = (1, 1)
        let m = vec![vec![r("0"), r("a")], vec![r("b"), r("1")]];
        let b = vec![vec![r("a")], vec![r("b + 1")]];
        let x = solve(&m, &b).unwrap();
        assert_eq!(x, vec![vec![r("1")], vec![r("1")]]);
        let m = vec![vec![r("1/a"), r("1/b")], vec![r("b"), r("2*a")]];
        let b = vec![vec![r("1")], vec![r("0")]];
        let x = solve(&m, &b).unwrap();
        let check = &(&m[0][0] * &x[0][0]) + &(&m[0][1] * &x[1][0]);
        assert!(check.is_one());
        let sing = vec![vec![r("a"), r("b")], vec![r("2*a"), r("2*b")]];
        assert!(solve(&sing, &b).is_none());
    }
}
