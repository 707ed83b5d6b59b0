//! Factorization over Z: squarefree decomposition, modular factorization,
//! quadratic Hensel lifting and subset recombination.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::modp::{self, Fpx};
use super::zpoly::{QPoly, ZPoly};
use crate::arith::{big_mod_u64, next_prime};

/// Factor a nonzero integer polynomial into its content and primitive irreducible
/// factors (positive leading coefficients) with multiplicities.
pub fn factor_zpoly(f: &ZPoly) -> (BigInt, Vec<(ZPoly, u32)>) {
    factor_zpoly_with_hint(f, 1)
}

/// As [`factor_zpoly`], with the promise that every irreducible factor of each
/// squarefree part has degree divisible by `degree_step`.
pub fn factor_zpoly_with_hint(f: &ZPoly, degree_step: usize) -> (BigInt, Vec<(ZPoly, u32)>) {
    assert!(!f.is_zero(), "cannot factor the zero polynomial");
    let content = f.content();
    let prim = f.primitive_part();
    let mut out = Vec::new();
    for (g, e) in squarefree_decomposition(&prim) {
        for h in factor_squarefree(&g, degree_step) {
            out.push((h, e));
        }
    }
    out.sort();
    (content, out)
}

/// Yun's algorithm over Q, returned as primitive integer polynomials.
pub fn squarefree_decomposition(f: &ZPoly) -> Vec<(ZPoly, u32)> {
    let mut out = Vec::new();
    if f.deg() == 0 {
        return out;
    }
    if squarefree_mod_some_prime(f) {
        out.push((f.primitive_part(), 1));
        return out;
    }
    let fq = f.to_qpoly();
    let d = fq.derivative();
    let a0 = fq.gcd(&d);
    let mut b = fq.div_rem(&a0).0;
    let mut c = d.div_rem(&a0).0;
    let mut dd = sub_q(&c, &b.derivative());
    let mut i = 1;
    while b.deg() > 0 {
        let a = b.gcd(&dd);
        b = b.div_rem(&a).0;
        c = dd.div_rem(&a).0;
        dd = sub_q(&c, &b.derivative());
        if a.deg() > 0 {
            out.push((a.to_primitive_zpoly(), i));
        }
        i += 1;
    }
    out
}

/// Squarefree mod a prime not dividing lc(f) implies squarefree over Q.
fn squarefree_mod_some_prime(f: &ZPoly) -> bool {
    let lc = f.lc();
    let mut p = 1000u64;
    for _ in 0..6 {
        p = next_prime(p);
        if big_mod_u64(&lc, p) != 0 && modp::is_squarefree(&reduce_mod_p(f, p), p) {
            return true;
        }
    }
    false
}

fn sub_q(a: &QPoly, b: &QPoly) -> QPoly {
    let n = a.coeffs().len().max(b.coeffs().len());
    QPoly::new((0..n).map(|i| a.coeff(i) - b.coeff(i)).collect())
}

fn reduce_mod_p(f: &ZPoly, p: u64) -> Fpx {
    modp::trim(f.coeffs().iter().map(|c| big_mod_u64(c, p)).collect())
}

fn subset_sums(degs: &[usize]) -> Vec<bool> {
    let n: usize = degs.iter().sum();
    let mut reach = vec![false; n + 1];
    reach[0] = true;
    for &d in degs {
        for s in (d..=n).rev() {
            if reach[s - d] {
                reach[s] = true;
            }
        }
    }
    reach
}

/// Irreducible factors of a primitive squarefree polynomial.
fn factor_squarefree(f: &ZPoly, degree_step: usize) -> Vec<ZPoly> {
    let n = f.deg();
    if n <= 1 {
        return vec![f.primitive_part()];
    }
    let step = if degree_step > 0 && n.is_multiple_of(degree_step) { degree_step } else { 1 };
    let lc = f.lc();

    // Try several primes; keep the one with the fewest modular factors and
    // intersect the achievable factor degrees.
    let mut allowed: Vec<bool> = (0..=n).map(|d| d % step == 0).collect();
    let mut best: Option<(u64, Vec<Fpx>)> = None;
    let mut p = 2u64;
    let mut tried = 0;
    while tried < 8 {
        p = next_prime(p);
        if big_mod_u64(&lc, p) == 0 {
            continue;
        }
        let fp = reduce_mod_p(f, p);
        if !modp::is_squarefree(&fp, p) {
            continue;
        }
        tried += 1;
        let facs = modp::factor_squarefree(&fp, p);
        let degs: Vec<usize> = facs.iter().map(|g| g.len() - 1).collect();
        let reach = subset_sums(&degs);
        for d in 0..=n {
            allowed[d] = allowed[d] && reach[d];
        }
        if best.as_ref().is_none_or(|(_, b)| facs.len() < b.len()) {
            best = Some((p, facs));
        }
        if (1..n).all(|d| !allowed[d]) {
            return vec![f.primitive_part()];
        }
    }
    let (p, facs) = best.expect("a good prime exists");
    if facs.len() == 1 {
        return vec![f.primitive_part()];
    }

    // Coefficient bound for lc * (any factor).
    let norm2: BigInt = f.coeffs().iter().map(|c| c * c).sum();
    let bound = lc.abs() * (BigInt::one() << n) * (norm2.sqrt() + BigInt::one());
    let target = bound * 2 + BigInt::one();
    let pb = BigInt::from(p);
    let (lifted, modulus) = hensel_lift(f, &facs, p, &pb, &target);

    recombine(f, lifted, &modulus, &allowed)
}

fn sym_mod(c: &BigInt, m: &BigInt) -> BigInt {
    let r = c.mod_floor(m);
    if &r * 2 > *m {
        r - m
    } else {
        r
    }
}

fn poly_mod(v: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    let mut out: Vec<BigInt> = v.iter().map(|c| c.mod_floor(m)).collect();
    while out.last().is_some_and(|c| c.is_zero()) {
        out.pop();
    }
    out
}

fn pmul(a: &[BigInt], b: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut v = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            v[i + j] += x * y;
        }
    }
    poly_mod(&v, m)
}

fn padd(a: &[BigInt], b: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    let n = a.len().max(b.len());
    let z = BigInt::zero();
    let v: Vec<BigInt> = (0..n).map(|i| a.get(i).unwrap_or(&z) + b.get(i).unwrap_or(&z)).collect();
    poly_mod(&v, m)
}

fn psub(a: &[BigInt], b: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    let n = a.len().max(b.len());
    let z = BigInt::zero();
    let v: Vec<BigInt> = (0..n).map(|i| a.get(i).unwrap_or(&z) - b.get(i).unwrap_or(&z)).collect();
    poly_mod(&v, m)
}

/// Division by a monic polynomial modulo `m`.
fn pdivrem_monic(a: &[BigInt], h: &[BigInt], m: &BigInt) -> (Vec<BigInt>, Vec<BigInt>) {
    let dh = h.len() - 1;
    if a.len() <= dh {
        return (Vec::new(), poly_mod(a, m));
    }
    let mut r: Vec<BigInt> = a.to_vec();
    let mut q = vec![BigInt::zero(); a.len() - dh];
    for i in (0..q.len()).rev() {
        let t = r[i + dh].mod_floor(m);
        if t.is_zero() {
            continue;
        }
        for (j, hc) in h.iter().enumerate() {
            r[i + j] -= &t * hc;
        }
        q[i] = t;
    }
    r.truncate(dh);
    (poly_mod(&q, m), poly_mod(&r, m))
}

fn to_big(a: &[u64]) -> Vec<BigInt> {
    a.iter().map(|&c| BigInt::from(c)).collect()
}

/// Lift `f = lc * prod(facs) mod p` to a modulus at least `target`.
/// Returns monic lifted factors and the final modulus.
fn hensel_lift(f: &ZPoly, facs: &[Fpx], p: u64, pb: &BigInt, target: &BigInt) -> (Vec<Vec<BigInt>>, BigInt) {
    let mut modulus = pb.clone();
    let mut steps = 0u32;
    while &modulus < target {
        modulus = &modulus * &modulus;
        steps += 1;
    }
    let lifted = lift_tree(f.coeffs(), facs, p, pb, steps);
    (lifted, modulus)
}

fn lift_tree(f: &[BigInt], facs: &[Fpx], p: u64, pb: &BigInt, steps: u32) -> Vec<Vec<BigInt>> {
    let lc = f.last().unwrap().clone();
    if facs.len() == 1 {
        let mut m = pb.clone();
        for _ in 0..steps {
            m = &m * &m;
        }
        let inv = mod_inverse(&lc, &m);
        let monic: Vec<BigInt> = f.iter().map(|c| (c * &inv).mod_floor(&m)).collect();
        return vec![monic];
    }
    let half = facs.len() / 2;
    let (left, right) = facs.split_at(half);
    let lcp = big_mod_u64(&lc, p);
    let mut g: Fpx = vec![lcp];
    for h in left {
        g = modp::mul(&g, h, p);
    }
    let mut h: Fpx = vec![1];
    for x in right {
        h = modp::mul(&h, x, p);
    }
    let (one, s, t) = modp::ext_gcd(&g, &h, p);
    debug_assert_eq!(one, vec![1]);
    let mut m = pb.clone();
    let (mut g, mut h, mut s, mut t) = (to_big(&g), to_big(&h), to_big(&s), to_big(&t));
    for _ in 0..steps {
        let m2 = &m * &m;
        let e = psub(f, &pmul(&g, &h, &m2), &m2);
        let (q, r) = pdivrem_monic(&pmul(&s, &e, &m2), &h, &m2);
        let g2 = padd(&padd(&g, &pmul(&t, &e, &m2), &m2), &pmul(&q, &g, &m2), &m2);
        let h2 = padd(&h, &r, &m2);
        let b = psub(&padd(&pmul(&s, &g2, &m2), &pmul(&t, &h2, &m2), &m2), &[BigInt::one()], &m2);
        let (c, d) = pdivrem_monic(&pmul(&s, &b, &m2), &h2, &m2);
        let s2 = psub(&s, &d, &m2);
        let t2 = psub(&psub(&t, &pmul(&t, &b, &m2), &m2), &pmul(&c, &g2, &m2), &m2);
        g = g2;
        h = h2;
        s = s2;
        t = t2;
        m = m2;
    }
    // g carries lc(f); h is monic.
    let mut out = lift_tree(&g, left, p, pb, steps);
    out.extend(lift_tree(&h, right, p, pb, steps));
    out
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.extended_gcd(m);
    assert!(e.gcd.is_one(), "non-invertible leading coefficient");
    e.x.mod_floor(m)
}

fn for_each_subset(n: usize, k: usize, mut visit: impl FnMut(&[usize]) -> bool) {
    // visit returns true to stop
    let mut idx: Vec<usize> = (0..k).collect();
    if k > n {
        return;
    }
    loop {
        if visit(&idx) {
            return;
        }
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 && idx[0] == n - k {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn recombine(f: &ZPoly, mut lifted: Vec<Vec<BigInt>>, m: &BigInt, allowed: &[bool]) -> Vec<ZPoly> {
    let mut f = f.clone();
    let mut found = Vec::new();
    let mut size = 1;
    while 2 * size <= lifted.len() {
        let lc = f.lc();
        let f0 = f.coeff(0);
        let degs: Vec<usize> = lifted.iter().map(|g| g.len() - 1).collect();
        let mut hit: Option<(Vec<usize>, ZPoly)> = None;
        for_each_subset(lifted.len(), size, |sub| {
            let d: usize = sub.iter().map(|&i| degs[i]).sum();
            if d >= allowed.len() || !allowed[d] {
                return false;
            }
            // constant-term test
            if !f0.is_zero() {
                let mut c = lc.clone();
                for &i in sub {
                    c = (c * &lifted[i][0]).mod_floor(m);
                }
                let c = sym_mod(&c, m);
                if c.is_zero() || !(&lc * &f0).is_multiple_of(&c) {
                    return false;
                }
            }
            let mut g: Vec<BigInt> = vec![lc.mod_floor(m)];
            for &i in sub {
                g = pmul(&g, &lifted[i], m);
            }
            let cand = ZPoly::new(g.iter().map(|c| sym_mod(c, m)).collect()).primitive_part();
            if cand.deg() == 0 {
                return false;
            }
            if let Some(q) = f.div_exact(&cand) {
                hit = Some((sub.to_vec(), q));
                found.push(cand);
                true
            } else {
                false
            }
        });
        match hit {
            Some((sub, q)) => {
                f = q;
                let mut k = 0;
                lifted.retain(|_| {
                    let keep = !sub.contains(&k);
                    k += 1;
                    keep
                });
            }
            None => size += 1,
        }
    }
    if f.deg() > 0 {
        found.push(f.primitive_part());
    }
    found
}

/// Integer roots of an integer polynomial (used by small helpers).
pub fn integer_roots(f: &ZPoly) -> Vec<BigInt> {
    let (_, facs) = factor_zpoly(f);
    let mut r: Vec<BigInt> = facs
        .iter()
        .filter(|(g, _)| g.deg() == 1 && g.lc().is_one())
        .map(|(g, _)| -g.coeff(0))
        .collect();
    r.sort();
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn product(fs: &[(ZPoly, u32)]) -> ZPoly {
        let mut acc = ZPoly::one();
        for (g, e) in fs {
            for _ in 0..*e {
                acc = &acc * g;
            }
        }
        acc
    }

    #[test]
    fn swinnerton_dyer_like_product() {
        // (x^2 - 2)(x^2 - 3)(x^4 - 10x^2 + 1)(3x + 5)^2
        let a = ZPoly::from_i64(&[-2, 0, 1]);
        let b = ZPoly::from_i64(&[-3, 0, 1]);
        let c = ZPoly::from_i64(&[1, 0, -10, 0, 1]);
        let d = ZPoly::from_i64(&[5, 3]);
        let f = &(&(&a * &b) * &c) * &(&d * &d);
        let (content, fs) = factor_zpoly(&f);
        assert!(content.is_one());
        assert_eq!(product(&fs), f);
        assert_eq!(fs.len(), 4);
        assert!(fs.contains(&(d, 2)));
    }

    #[test]
    fn irreducible_stays_whole() {
        let f = ZPoly::from_i64(&[1, 0, -1, 1]);
        let (_, fs) = factor_zpoly(&f);
        assert_eq!(fs, vec![(f, 1)]);
    }

    #[test]
    fn many_linear_factors() {
        let mut f = ZPoly::one();
        for r in [-7i64, -3, 0, 2, 5, 11, 13, 101] {
            f = &f * &ZPoly::from_i64(&[-r, 1]);
        }
        let f = f.scale(&BigInt::from(6));
        let (content, fs) = factor_zpoly(&f);
        assert_eq!(content, BigInt::from(6));
        assert_eq!(fs.len(), 8);
        assert_eq!(integer_roots(&f).len(), 8);
    }

    #[test]
    fn non_monic_recombination() {
        let a = ZPoly::from_i64(&[7, -4, 0, 12]);
        let b = ZPoly::from_i64(&[-5, 9, 2, 0, 0, 3]);
        let f = &a * &b;
        let (_, fs) = factor_zpoly(&f);
        assert_eq!(product(&fs), f);
    }
}
