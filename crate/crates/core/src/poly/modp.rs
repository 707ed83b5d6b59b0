//! Polynomials over a prime field `Z/p`, with distinct- and equal-degree factorization.

use crate::arith::{inv_mod, mul_mod, pow_mod};

/// Coefficients constant-term first, reduced to `[0, p)`, no trailing zeros.
pub type Fpx = Vec<u64>;

pub fn trim(mut a: Fpx) -> Fpx {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

pub fn add(a: &[u64], b: &[u64], p: u64) -> Fpx {
    let n = a.len().max(b.len());
    trim((0..n)
        .map(|i| (a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0)) % p)
        .collect())
}

pub fn sub(a: &[u64], b: &[u64], p: u64) -> Fpx {
    let n = a.len().max(b.len());
    trim((0..n)
        .map(|i| (a.get(i).copied().unwrap_or(0) + p - b.get(i).copied().unwrap_or(0)) % p)
        .collect())
}

pub fn scale(a: &[u64], k: u64, p: u64) -> Fpx {
    trim(a.iter().map(|&c| mul_mod(c, k, p)).collect())
}

pub fn mul(a: &[u64], b: &[u64], p: u64) -> Fpx {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut v = vec![0u128; a.len() + b.len() - 1];
    let pp = p as u128;
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            v[i + j] = (v[i + j] + x as u128 * y as u128) % pp;
        }
    }
    trim(v.into_iter().map(|c| c as u64).collect())
}

/// Quotient and remainder; `b` must be nonzero.
pub fn div_rem(a: &[u64], b: &[u64], p: u64) -> (Fpx, Fpx) {
    let db = b.len() - 1;
    if a.len() < b.len() {
        return (Vec::new(), a.to_vec());
    }
    let inv = inv_mod(b[db], p).expect("leading coefficient invertible");
    let mut r = a.to_vec();
    let mut q = vec![0u64; a.len() - db];
    for i in (0..q.len()).rev() {
        let t = mul_mod(r[i + db], inv, p);
        if t == 0 {
            continue;
        }
        q[i] = t;
        for (j, &bc) in b.iter().enumerate() {
            r[i + j] = (r[i + j] + p - mul_mod(t, bc, p)) % p;
        }
    }
    r.truncate(db);
    (trim(q), trim(r))
}

pub fn rem(a: &[u64], b: &[u64], p: u64) -> Fpx {
    div_rem(a, b, p).1
}

pub fn monic(a: &[u64], p: u64) -> Fpx {
    match a.last() {
        None => Vec::new(),
        Some(&l) => scale(a, inv_mod(l, p).unwrap(), p),
    }
}

pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Fpx {
    let mut x = trim(a.to_vec());
    let mut y = trim(b.to_vec());
    while !y.is_empty() {
        let r = rem(&x, &y, p);
        x = y;
        y = r;
    }
    monic(&x, p)
}

/// Extended gcd: returns (g, s, t) with s*a + t*b = g monic.
pub fn ext_gcd(a: &[u64], b: &[u64], p: u64) -> (Fpx, Fpx, Fpx) {
    let (mut r0, mut r1) = (trim(a.to_vec()), trim(b.to_vec()));
    let (mut s0, mut s1): (Fpx, Fpx) = (vec![1], vec![]);
    let (mut t0, mut t1): (Fpx, Fpx) = (vec![], vec![1]);
    while !r1.is_empty() {
        let (q, r) = div_rem(&r0, &r1, p);
        let s2 = sub(&s0, &mul(&q, &s1, p), p);
        let t2 = sub(&t0, &mul(&q, &t1, p), p);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    let l = *r0.last().unwrap();
    let il = inv_mod(l, p).unwrap();
    (scale(&r0, il, p), scale(&s0, il, p), scale(&t0, il, p))
}

pub fn derivative(a: &[u64], p: u64) -> Fpx {
    trim(a.iter().enumerate().skip(1).map(|(i, &c)| mul_mod(c, i as u64 % p, p)).collect())
}

pub fn pow_mod_poly(base: &[u64], mut e: u128, m: &[u64], p: u64) -> Fpx {
    let mut r: Fpx = rem(&[1], m, p);
    let mut b = rem(base, m, p);
    while e > 0 {
        if e & 1 == 1 {
            r = rem(&mul(&r, &b, p), m, p);
        }
        b = rem(&mul(&b, &b, p), m, p);
        e >>= 1;
    }
    r
}

pub fn eval(a: &[u64], x: u64, p: u64) -> u64 {
    a.iter().rev().fold(0, |acc, &c| (mul_mod(acc, x, p) + c) % p)
}

pub fn is_squarefree(a: &[u64], p: u64) -> bool {
    gcd(a, &derivative(a, p), p).len() == 1
}

/// Distinct-degree factorization of a squarefree monic polynomial.
pub fn distinct_degree(f: &[u64], p: u64) -> Vec<(Fpx, usize)> {
    let mut out = Vec::new();
    let mut f = f.to_vec();
    let x: Fpx = vec![0, 1];
    let mut h = rem(&x, &f, p);
    let mut d = 0;
    while f.len() > 1 {
        d += 1;
        if 2 * d > f.len() - 1 {
            let deg = f.len() - 1;
            out.push((f.clone(), deg));
            break;
        }
        h = pow_mod_poly(&h, p as u128, &f, p);
        let g = gcd(&sub(&h, &x, p), &f, p);
        if g.len() > 1 {
            f = div_rem(&f, &g, p).0;
            h = rem(&h, &f, p);
            out.push((g, d));
        }
    }
    out
}

/// Split a product of monic irreducibles of common degree `d` (odd `p`).
pub fn equal_degree(f: &[u64], d: usize, p: u64, seed: &mut u64) -> Vec<Fpx> {
    let n = f.len() - 1;
    if n == d {
        return vec![f.to_vec()];
    }
    loop {
        let a: Fpx = trim((0..n).map(|_| next_rand(seed) % p).collect());
        if a.len() < 2 {
            continue;
        }
        let g = if p == 2 {
            // trace map a + a^2 + ... + a^(2^(d-1))
            let mut t = a.clone();
            let mut acc = a.clone();
            for _ in 1..d {
                t = rem(&mul(&t, &t, p), f, p);
                acc = add(&acc, &t, p);
            }
            gcd(&acc, f, p)
        } else {
            let e = ((p as u128).pow(d as u32) - 1) / 2;
            let b = pow_mod_poly(&a, e, f, p);
            gcd(&sub(&b, &[1], p), f, p)
        };
        if g.len() > 1 && g.len() < f.len() {
            let h = div_rem(f, &g, p).0;
            let mut out = equal_degree(&g, d, p, seed);
            out.extend(equal_degree(&monic(&h, p), d, p, seed));
            return out;
        }
    }
}

fn next_rand(state: &mut u64) -> u64 {
    *state ^= *state << 13;
    *state ^= *state >> 7;
    *state ^= *state << 17;
    *state
}

/// Monic irreducible factors of a squarefree polynomial.
pub fn factor_squarefree(f: &[u64], p: u64) -> Vec<Fpx> {
    let f = monic(f, p);
    let mut seed = 0x9E37_79B9_7F4A_7C15u64 ^ p;
    let mut out = Vec::new();
    for (g, d) in distinct_degree(&f, p) {
        out.extend(equal_degree(&g, d, p, &mut seed));
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

/// Roots in `Z/p` of a nonzero polynomial, ascending, without multiplicity.
pub fn roots(f: &[u64], p: u64) -> Vec<u64> {
    let f = monic(&trim(f.to_vec()), p);
    if f.len() <= 1 {
        return Vec::new();
    }
    if p < 64 {
        return (0..p).filter(|&x| eval(&f, x, p) == 0).collect();
    }
    let xp = pow_mod_poly(&[0, 1], p as u128, &f, p);
    let g = gcd(&sub(&xp, &[0, 1], p), &f, p);
    if g.len() <= 1 {
        return Vec::new();
    }
    let mut seed = 0x2545_F491_4F6C_DD1Du64 ^ p;
    let mut r: Vec<u64> = equal_degree(&g, 1, p, &mut seed)
        .into_iter()
        .map(|lin| (p - lin[0]) % p)
        .collect();
    r.sort_unstable();
    r
}

/// Squarefree decomposition (Musser), valid in characteristic `p`.
pub fn squarefree_decomposition(f: &[u64], p: u64) -> Vec<(Fpx, u32)> {
    let f = monic(&trim(f.to_vec()), p);
    let mut out = Vec::new();
    if f.len() <= 1 {
        return out;
    }
    let d = derivative(&f, p);
    let mut c = if d.is_empty() { f.clone() } else { gcd(&f, &d, p) };
    let mut w = div_rem(&f, &c, p).0;
    let mut i = 1;
    while w.len() > 1 {
        let y = gcd(&w, &c, p);
        let z = div_rem(&w, &y, p).0;
        if z.len() > 1 {
            out.push((monic(&z, p), i));
        }
        i += 1;
        c = div_rem(&c, &y, p).0;
        w = y;
    }
    if c.len() > 1 {
        // c is a polynomial in x^p; Frobenius is the identity on Z/p
        let root: Fpx = c.iter().step_by(p as usize).copied().collect();
        for (g, e) in squarefree_decomposition(&root, p) {
            out.push((g, e * p as u32));
        }
    }
    out
}

/// Full factorization into monic irreducibles with multiplicities.
pub fn factor(f: &[u64], p: u64) -> Vec<(Fpx, u32)> {
    let mut out = Vec::new();
    for (g, e) in squarefree_decomposition(f, p) {
        for h in factor_squarefree(&g, p) {
            out.push((h, e));
        }
    }
    out.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)));
    out
}

pub fn from_i64(coeffs: &[i64], p: u64) -> Fpx {
    trim(coeffs.iter().map(|&c| c.rem_euclid(p as i64) as u64).collect())
}

pub fn modp_pow(b: u64, e: u64, p: u64) -> u64 {
    pow_mod(b, e, p)
}
