//! Multivariate GCD over the rationals.
//!
//! Recursive primitive polynomial remainder sequences with content extraction.
//! Before running a PRS, a modular image test (one evaluation per variable,
//! modulo a 61-bit prime) proves coprimality in the common case cheaply.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};

use super::coeff::Q;
use super::poly::{Mono, Poly};

const P: u64 = (1 << 61) - 1;

/// Greatest common divisor, returned with coprime integer coefficients and a
/// positive lex-leading coefficient. `gcd(0, 0) = 0`.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.integer_primitive();
    }
    if b.is_zero() {
        return a.integer_primitive();
    }
    let vars = a.vars().clone();
    if a.is_constant() || b.is_constant() {
        return Poly::one(&vars);
    }
    let ma = min_mono(a);
    let mb = min_mono(b);
    let m = ma.gcd(&mb);
    let a1 = strip_mono(a, &ma);
    let b1 = strip_mono(b, &mb);
    let g = gcd_no_mono(a1, b1);
    if m.is_one() {
        g
    } else {
        g.mul_term(&m, &Q::one())
    }
}

/// Content of `p` viewed as a polynomial in `v`.
pub fn content_in(p: &Poly, v: usize) -> Poly {
    let mut coeffs: Vec<Poly> = p.coefficients_in(v).into_iter().filter(|c| !c.is_zero()).collect();
    coeffs.sort_by_key(|c| c.nterms());
    let mut it = coeffs.into_iter();
    let mut g = match it.next() {
        Some(c) => c.integer_primitive(),
        None => return Poly::zero(p.vars()),
    };
    for c in it {
        if g.is_constant() {
            break;
        }
        g = gcd(&g, &c);
    }
    if g.is_constant() {
        Poly::one(p.vars())
    } else {
        g
    }
}

fn min_mono(p: &Poly) -> Mono {
    let mut it = p.terms().map(|(m, _)| m);
    let first = it.next().expect("nonzero").clone();
    it.fold(first, |acc, m| acc.gcd(m))
}

fn strip_mono(p: &Poly, m: &Mono) -> Poly {
    if m.is_one() {
        return p.clone();
    }
    Poly::from_terms(p.vars(), p.terms().map(|(k, c)| (k.div(m).expect("min mono divides"), c.clone())))
}

fn gcd_no_mono(mut a: Poly, mut b: Poly) -> Poly {
    let vars = a.vars().clone();
    loop {
        if a.is_constant() || b.is_constant() {
            return Poly::one(&vars);
        }
        let oa = a.occurring();
        let ob = b.occurring();
        if let Some(v) = (0..vars.len()).find(|&v| oa[v] && !ob[v]) {
            a = content_in(&a, v);
            continue;
        }
        if let Some(v) = (0..vars.len()).find(|&v| ob[v] && !oa[v]) {
            b = content_in(&b, v);
            continue;
        }
        break;
    }
    let common: Vec<usize> = {
        let oa = a.occurring();
        (0..vars.len()).filter(|&v| oa[v]).collect()
    };
    if common.is_empty() {
        return Poly::one(&vars);
    }
    if common.len() > 1 && modular_coprime(&a, &b, &common) {
        return Poly::one(&vars);
    }
    let v = *common
        .iter()
        .min_by_key(|&&v| (a.degree_in(v).max(b.degree_in(v)), v))
        .expect("nonempty");
    let ca = content_in(&a, v);
    let cb = content_in(&b, v);
    let c = gcd(&ca, &cb);
    let pa = if ca.is_constant() { a } else { a.div_exact(&ca).expect("content divides") };
    let pb = if cb.is_constant() { b } else { b.div_exact(&cb).expect("content divides") };
    let g = primitive_prs(pa, pb, v);
    c.mul(&g).integer_primitive()
}

fn primitive_in(p: &Poly, v: usize) -> Poly {
    let c = content_in(p, v);
    let q = if c.is_constant() { p.clone() } else { p.div_exact(&c).expect("content divides") };
    q.integer_primitive()
}

fn primitive_prs(p: Poly, q: Poly, v: usize) -> Poly {
    let (mut p, mut q) = if p.degree_in(v) >= q.degree_in(v) { (p, q) } else { (q, p) };
    let vars = p.vars().clone();
    loop {
        let r = pseudo_remainder(&p, &q, v);
        if r.is_zero() {
            return primitive_in(&q, v);
        }
        if r.degree_in(v) == 0 {
            return Poly::one(&vars);
        }
        p = q;
        q = primitive_in(&r, v);
    }
}

/// A nonzero multiple (by a power of lc(q)) of the pseudo-remainder of `p` by `q` in `v`.
pub(crate) fn pseudo_remainder(p: &Poly, q: &Poly, v: usize) -> Poly {
    let vars = p.vars().clone();
    let qc = q.coefficients_in(v);
    let dq = qc.len() - 1;
    let lcq = &qc[dq];
    let mut r = p.coefficients_in(v);
    trim(&mut r);
    while !r.is_empty() && r.len() - 1 >= dq {
        let dr = r.len() - 1;
        let t = r[dr].clone();
        let shift = dr - dq;
        for c in r.iter_mut() {
            *c = c.mul(lcq);
        }
        for (k, qk) in qc.iter().enumerate() {
            r[k + shift] = r[k + shift].sub(&t.mul(qk));
        }
        debug_assert!(r[dr].is_zero());
        trim(&mut r);
    }
    Poly::from_coefficients_in(&vars, v, &r)
}

fn trim(r: &mut Vec<Poly>) {
    while r.last().is_some_and(|c| c.is_zero()) {
        r.pop();
    }
}

// ---- modular coprimality test ----

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % P as u128) as u64
}

fn powmod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a);
        }
        a = mulmod(a, a);
        e >>= 1;
    }
    r
}

fn invmod(a: u64) -> u64 {
    powmod(a, P - 2)
}

fn bigint_mod(n: &BigInt) -> u64 {
    let m = BigInt::from(P);
    let r = ((n % &m) + &m) % &m;
    r.to_u64().expect("reduced")
}

fn q_mod(c: &Q) -> Option<u64> {
    let d = bigint_mod(c.denom());
    if d == 0 {
        return None;
    }
    Some(mulmod(bigint_mod(c.numer()), invmod(d)))
}

struct SplitMix(u64);

impl SplitMix {
    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        (z ^ (z >> 31)) % P
    }
}

/// Dense image of `p` in `F_P[v]` with all other variables evaluated at `point`.
fn univariate_image(p: &Poly, v: usize, point: &[u64]) -> Option<Vec<u64>> {
    let mut out = vec![0u64; p.degree_in(v) as usize + 1];
    for (m, c) in p.terms() {
        let mut t = q_mod(c)?;
        for (i, &e) in m.exponents().iter().enumerate() {
            if i != v && e > 0 {
                t = mulmod(t, powmod(point[i], e as u64));
            }
        }
        let k = m.exp(v) as usize;
        out[k] = (out[k] + t) % P;
    }
    Some(out)
}

fn trim_mod(a: &mut Vec<u64>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn gcd_mod_degree(mut a: Vec<u64>, mut b: Vec<u64>) -> usize {
    trim_mod(&mut a);
    trim_mod(&mut b);
    while !b.is_empty() {
        // a <- a mod b
        let inv = invmod(*b.last().expect("nonempty"));
        while a.len() >= b.len() {
            let f = mulmod(*a.last().expect("nonempty"), inv);
            let shift = a.len() - b.len();
            for (k, &bk) in b.iter().enumerate() {
                a[k + shift] = (a[k + shift] + P - mulmod(f, bk)) % P;
            }
            trim_mod(&mut a);
            if a.is_empty() {
                break;
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}

/// True only when `a` and `b` are certainly coprime.
fn modular_coprime(a: &Poly, b: &Poly, common: &[usize]) -> bool {
    let n = a.vars().len();
    let mut rng = SplitMix(0x5EED ^ (a.nterms() as u64) << 17 ^ b.nterms() as u64);
    let point: Vec<u64> = (0..n).map(|_| rng.next().max(2)).collect();
    for &v in common {
        let (ia, ib) = match (univariate_image(a, v, &point), univariate_image(b, v, &point)) {
            (Some(x), Some(y)) => (x, y),
            _ => return false,
        };
        // leading coefficients must survive the evaluation
        if ia.last().copied().unwrap_or(0) == 0 || ib.last().copied().unwrap_or(0) == 0 {
            return false;
        }
        if gcd_mod_degree(ia, ib) > 0 {
            return false;
        }
    }
    true
}
