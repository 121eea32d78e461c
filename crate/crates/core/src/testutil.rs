//! Random inputs shared by the unit tests.
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::diffop::{Diffeo, LinDiffOp, MultiIndex};
use crate::symexpr::{q, Mono, Poly, Rat, VarSet};

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

/// Polynomial in the variables `on` of total degree ≤ `deg` with small integer coefficients.
pub fn rand_poly(r: &mut ChaCha8Rng, vars: &VarSet, on: &[usize], deg: u16, nterms: usize) -> Rat {
    let mut p = Poly::zero(vars);
    for _ in 0..nterms {
        let mut e = vec![0u16; vars.len()];
        let mut left = r.gen_range(0..=deg);
        for &v in on {
            let k = r.gen_range(0..=left);
            e[v] = k;
            left -= k;
        }
        let c = r.gen_range(-3i64..=3);
        p.add_term(Mono::from_exponents(&e), q(c));
    }
    Rat::from_poly(p)
}

/// Nonzero polynomial with a nonzero constant term (so it is nonvanishing near the origin).
pub fn rand_unit_poly(r: &mut ChaCha8Rng, vars: &VarSet, on: &[usize], deg: u16) -> Rat {
    let p = rand_poly(r, vars, on, deg, 2);
    let c = r.gen_range(2i64..=4);
    &p.scale(&crate::symexpr::q_frac(1, 4)) + &Rat::int(vars, c)
}

/// Triangular polynomial diffeomorphism (dim 2) or Möbius map (dim 1), with exact inverse.
pub fn rand_diffeo(r: &mut ChaCha8Rng, vars: &VarSet) -> Diffeo {
    let x = |i| Rat::var(vars, i);
    if vars.len() == 1 {
        let (a, b, c) = (r.gen_range(1i64..=3), r.gen_range(-2i64..=2), r.gen_range(0i64..=1));
        // φ(x) = (a x + b)/(c x + 1), φ⁻¹(u) = (u − b)/(a − c u)
        let num = &x(0).scale(&q(a)) + &Rat::int(vars, b);
        let den = &x(0).scale(&q(c)) + &Rat::int(vars, 1);
        let inum = &x(0) - &Rat::int(vars, b);
        let iden = &Rat::int(vars, a) - &x(0).scale(&q(c));
        return Diffeo::new(vars, vec![&num / &den], vec![&inum / &iden]).unwrap();
    }
    let p = rand_poly(r, vars, &[1], 2, 2);
    let s = Diffeo::new(vars, vec![&x(0) + &p, x(1)], vec![&x(0) - &p, x(1)]).unwrap();
    let qq = rand_poly(r, vars, &[0], 2, 2);
    let t = Diffeo::new(vars, vec![x(0), &x(1) + &qq], vec![x(0), &x(1) - &qq]).unwrap();
    let k = r.gen_range(1i64..=2);
    let sc = Diffeo::new(vars, vec![x(0).scale(&q(k)), x(1)], vec![x(0).scale(&crate::symexpr::q_frac(1, k)), x(1)])
        .unwrap();
    t.after(&s).unwrap().after(&sc).unwrap()
}

/// Operator whose third-order part is a hyperbolic symbol pushed through a
/// random linear change; lower coefficients are random polynomials.
pub fn rand_regular_op(r: &mut ChaCha8Rng, vars: &VarSet, dim: usize) -> LinDiffOp {
    let base: Vec<usize> = (0..dim).collect();
    let mut coeffs = Vec::new();
    if dim == 1 {
        coeffs.push((MultiIndex::new(vec![3]), rand_unit_poly(r, vars, &base, 1)));
    } else {
        // (l1·∂)(l2·∂)(l3·∂) with real distinct directions, scaled by a unit
        let u = rand_unit_poly(r, vars, &base, 1);
        let dirs: Vec<(i64, i64)> = loop {
            let d: Vec<(i64, i64)> = (0..3).map(|_| (r.gen_range(-2i64..=2), r.gen_range(-2i64..=2))).collect();
            let indep = |a: (i64, i64), b: (i64, i64)| a.0 * b.1 - a.1 * b.0 != 0;
            if indep(d[0], d[1]) && indep(d[0], d[2]) && indep(d[1], d[2]) {
                break d;
            }
        };
        let mut cub = [0i64; 4];
        for m in 0..8u32 {
            let mut e1 = 0;
            let mut c = 1;
            for (k, d) in dirs.iter().enumerate() {
                if m >> k & 1 == 1 {
                    e1 += 1;
                    c *= d.0;
                } else {
                    c *= d.1;
                }
            }
            cub[3 - e1] += c;
        }
        for (k, c) in cub.iter().enumerate() {
            coeffs.push((MultiIndex::new(vec![(3 - k) as u8, k as u8]), u.scale(&q(*c))));
        }
    }
    for k in 0..=2 {
        for a in MultiIndex::of_order(dim, k) {
            coeffs.push((a, rand_poly(r, vars, &base, 2, 2)));
        }
    }
    LinDiffOp::plain(vars, &base, coeffs).unwrap()
}
