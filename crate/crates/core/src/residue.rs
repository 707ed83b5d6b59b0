//! Residue fields O_F/P, reduction of elements and curves, point counts.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::arith::{big_mod_u64, factor_u64, inv_mod, mul_mod, pow_mod};
use crate::curve::Curve;
use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::ideal::{primes_up_to_norm, PrimeIdeal};
use crate::poly::modp::{self, Fpx};

/// Elements are encoded as Σ cᵢ pⁱ where Σ cᵢ Xⁱ is the reduced polynomial.
pub type Elem = u64;

const TABLE_LIMIT: u64 = 1 << 22;

#[derive(Debug)]
pub struct ResidueField {
    pub p: u64,
    pub f: u32,
    pub q: u64,
    pub modulus: Fpx,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl ResidueField {
    pub fn new(p: u64, modulus: Fpx) -> Self {
        let f = (modulus.len() - 1) as u32;
        let q = p.checked_pow(f).expect("residue field size fits in u64");
        let mut k = ResidueField { p, f, q, modulus, exp: Vec::new(), log: Vec::new() };
        if f > 1 && q <= TABLE_LIMIT {
            k.build_tables();
        }
        k
    }

    pub fn for_prime(pr: &PrimeIdeal) -> Arc<ResidueField> {
        static C: OnceLock<Mutex<HashMap<(u64, Fpx), Arc<ResidueField>>>> = OnceLock::new();
        let cache = C.get_or_init(|| Mutex::new(HashMap::new()));
        let key = (pr.p, pr.residue_poly.clone());
        if let Some(k) = cache.lock().unwrap().get(&key) {
            return k.clone();
        }
        let k = Arc::new(ResidueField::new(pr.p, pr.residue_poly.clone()));
        cache.lock().unwrap().insert(key, k.clone());
        k
    }

    fn build_tables(&mut self) {
        let n = self.q - 1;
        let primes: Vec<u64> = factor_u64(n).into_iter().map(|(r, _)| r).collect();
        let g = (self.p..self.q)
            .find(|&g| primes.iter().all(|r| self.pow_slow(g, (n / r) as u128) != 1))
            .expect("primitive element");
        let mut exp = vec![0u32; n as usize];
        let mut log = vec![0u32; self.q as usize];
        let mut x: Elem = 1;
        for i in 0..n {
            exp[i as usize] = x as u32;
            log[x as usize] = i as u32;
            x = self.mul_slow(x, g);
        }
        self.exp = exp;
        self.log = log;
    }

    pub fn to_poly(&self, mut x: Elem) -> Fpx {
        let mut v = Vec::with_capacity(self.f as usize);
        for _ in 0..self.f {
            v.push(x % self.p);
            x /= self.p;
        }
        modp::trim(v)
    }

    pub fn from_poly(&self, v: &[u64]) -> Elem {
        let r = if v.len() > self.f as usize { modp::rem(v, &self.modulus, self.p) } else { v.to_vec() };
        r.iter().rev().fold(0, |acc, &c| acc * self.p + c % self.p)
    }

    pub fn from_int(&self, n: i64) -> Elem {
        n.rem_euclid(self.p as i64) as u64
    }

    pub fn from_bigint(&self, n: &BigInt) -> Elem {
        big_mod_u64(n, self.p)
    }

    pub fn add(&self, x: Elem, y: Elem) -> Elem {
        if self.f == 1 {
            let s = x as u128 + y as u128;
            return (s % self.p as u128) as u64;
        }
        let (mut x, mut y) = (x, y);
        let mut out = 0;
        let mut pw = 1;
        for _ in 0..self.f {
            out += ((x % self.p + y % self.p) % self.p) * pw;
            x /= self.p;
            y /= self.p;
            pw *= self.p;
        }
        out
    }

    pub fn neg(&self, x: Elem) -> Elem {
        if self.f == 1 {
            return (self.p - x) % self.p;
        }
        let mut x = x;
        let mut out = 0;
        let mut pw = 1;
        for _ in 0..self.f {
            out += ((self.p - x % self.p) % self.p) * pw;
            x /= self.p;
            pw *= self.p;
        }
        out
    }

    pub fn sub(&self, x: Elem, y: Elem) -> Elem {
        self.add(x, self.neg(y))
    }

    fn mul_slow(&self, x: Elem, y: Elem) -> Elem {
        let m = modp::mul(&self.to_poly(x), &self.to_poly(y), self.p);
        self.from_poly(&modp::rem(&m, &self.modulus, self.p))
    }

    fn pow_slow(&self, x: Elem, mut e: u128) -> Elem {
        let mut acc = 1;
        let mut b = x;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_slow(acc, b);
            }
            b = self.mul_slow(b, b);
            e >>= 1;
        }
        acc
    }

    pub fn mul(&self, x: Elem, y: Elem) -> Elem {
        if self.f == 1 {
            return mul_mod(x, y, self.p);
        }
        if x == 0 || y == 0 {
            return 0;
        }
        if self.exp.is_empty() {
            return self.mul_slow(x, y);
        }
        let n = self.q - 1;
        let s = (self.log[x as usize] as u64 + self.log[y as usize] as u64) % n;
        self.exp[s as usize] as u64
    }

    pub fn pow(&self, x: Elem, e: u128) -> Elem {
        if self.f == 1 {
            if x == 0 {
                return if e == 0 { 1 } else { 0 };
            }
            return pow_mod(x, (e % (self.p as u128 - 1)) as u64, self.p);
        }
        if x == 0 {
            return if e == 0 { 1 } else { 0 };
        }
        if self.exp.is_empty() {
            return self.pow_slow(x, e);
        }
        let n = (self.q - 1) as u128;
        let s = (self.log[x as usize] as u128 * (e % n)) % n;
        self.exp[s as usize] as u64
    }

    pub fn inv(&self, x: Elem) -> Option<Elem> {
        if x == 0 {
            return None;
        }
        if self.f == 1 {
            return inv_mod(x, self.p);
        }
        if self.exp.is_empty() {
            return Some(self.pow_slow(x, self.q as u128 - 2));
        }
        let n = self.q - 1;
        Some(self.exp[((n - self.log[x as usize] as u64) % n) as usize] as u64)
    }

    pub fn div(&self, x: Elem, y: Elem) -> Option<Elem> {
        Some(self.mul(x, self.inv(y)?))
    }

    /// Quadratic character for odd characteristic.
    pub fn chi(&self, x: Elem) -> i32 {
        if x == 0 {
            return 0;
        }
        if !self.exp.is_empty() {
            return if self.log[x as usize].is_multiple_of(2) { 1 } else { -1 };
        }
        let e = (self.q as u128 - 1) / 2;
        if self.pow(x, e) == 1 {
            1
        } else {
            -1
        }
    }

    /// The unique p-th root (Frobenius is bijective).
    pub fn pth_root(&self, x: Elem) -> Elem {
        self.pow(x, (self.q / self.p) as u128)
    }

    /// Some square root in odd characteristic, by exhaustive search for small q.
    pub fn sqrt(&self, x: Elem) -> Option<Elem> {
        if self.p == 2 {
            return Some(self.pth_root(x));
        }
        if self.chi(x) < 0 {
            return None;
        }
        (0..self.q).find(|&y| self.mul(y, y) == x)
    }

    /// Image of an integral element.
    pub fn reduce_integral(&self, c: &[BigInt; 3]) -> Elem {
        let v: Vec<u64> = c.iter().map(|x| big_mod_u64(x, self.p)).collect();
        self.from_poly(&modp::rem(&modp::trim(v), &self.modulus, self.p))
    }
}

/// Reduction of a P-integral element at P.
pub fn reduce_element(x: &FieldElement, pr: &PrimeIdeal) -> Result<Elem> {
    let k = ResidueField::for_prime(pr);
    reduce_with(&k, x, pr)
}

pub fn reduce_with(k: &ResidueField, x: &FieldElement, pr: &PrimeIdeal) -> Result<Elem> {
    if x.is_zero() {
        return Ok(0);
    }
    let d = x.denominator();
    if d.is_one() {
        return Ok(k.reduce_integral(&x.int_coords().unwrap()));
    }
    let p = BigInt::from(pr.p);
    let mut dd = d.clone();
    let mut vp = 0u32;
    while (&dd % &p).is_zero() {
        dd /= &p;
        vp += 1;
    }
    let num = x.scale(&BigRational::from_integer(d.clone()));
    if vp == 0 {
        let n = k.reduce_integral(&num.int_coords().unwrap());
        let di = k.inv(k.from_bigint(&d)).unwrap();
        return Ok(k.mul(n, di));
    }
    // x = num / (p^vp · dd) with p^vp = π^{e·vp} · w, w a P-unit
    let mut z = num;
    for _ in 0..pr.e * vp {
        z = pr.divide_by_pi(&z).ok_or(Error::NonIntegralAtP)?;
    }
    let mut w = FieldElement::from_int(1);
    let pe = FieldElement::from_bigint(p.clone());
    let mut pw = FieldElement::from_int(1);
    for _ in 0..pr.e {
        pw = &pw * &pr.generator;
    }
    let w1 = &pe / &pw;
    for _ in 0..vp {
        w = &w * &w1;
    }
    let zr = k.reduce_integral(&z.int_coords().unwrap());
    let wr = k.reduce_integral(&w.int_coords().unwrap());
    let den = k.mul(wr, k.from_bigint(&dd));
    Ok(k.mul(zr, k.inv(den).ok_or(Error::NonIntegralAtP)?))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApRecord {
    pub prime: PrimeIdeal,
    pub a_p: i64,
    pub point_count: u64,
}

/// Reduced a-invariants and the reduced discriminant.
pub fn reduce_curve(e: &Curve, pr: &PrimeIdeal, k: &ResidueField) -> Result<([Elem; 5], Elem)> {
    let mut a = [0; 5];
    for (i, x) in e.ainvs().iter().enumerate() {
        a[i] = reduce_with(k, x, pr)?;
    }
    let d = reduced_disc(k, &a);
    Ok((a, d))
}

pub fn reduced_disc(k: &ResidueField, a: &[Elem; 5]) -> Elem {
    let [a1, a2, a3, a4, a6] = *a;
    let c = |n: i64| k.from_int(n);
    let m = |x, y| k.mul(x, y);
    let ad = |x, y| k.add(x, y);
    let sb = |x, y| k.sub(x, y);
    let b2 = ad(m(a1, a1), m(c(4), a2));
    let b4 = ad(m(c(2), a4), m(a1, a3));
    let b6 = ad(m(a3, a3), m(c(4), a6));
    let b8 = sb(ad(sb(ad(m(m(a1, a1), a6), m(m(c(4), a2), a6)), m(m(a1, a3), a4)), m(m(a2, a3), a3)), m(a4, a4));
    let t1 = k.neg(m(m(b2, b2), b8));
    let t2 = m(c(8), m(m(b4, b4), b4));
    let t3 = m(c(27), m(b6, b6));
    let t4 = m(m(m(c(9), b2), b4), b6);
    ad(sb(sb(t1, t2), t3), t4)
}

/// #E(O_F/P) by exhaustive enumeration.
pub fn count_points(e: &Curve, pr: &PrimeIdeal) -> Result<ApRecord> {
    let k = ResidueField::for_prime(pr);
    let (a, d) = reduce_curve(e, pr, &k)?;
    if d == 0 {
        return Err(Error::BadReduction);
    }
    let n = count_affine(&k, &a) + 1;
    let q = k.q as i64;
    Ok(ApRecord { prime: pr.clone(), a_p: q + 1 - n as i64, point_count: n })
}

fn count_affine(k: &ResidueField, a: &[Elem; 5]) -> u64 {
    let [a1, a2, a3, a4, a6] = *a;
    if k.p <= 3 {
        let mut n = 0;
        for x in 0..k.q {
            let rhs = k.add(k.mul(k.add(k.mul(k.add(x, a2), x), a4), x), a6);
            let lin = k.add(k.mul(a1, x), a3);
            for y in 0..k.q {
                if k.add(k.mul(y, y), k.mul(lin, y)) == rhs {
                    n += 1;
                }
            }
        }
        return n;
    }
    let b2 = k.add(k.mul(a1, a1), k.mul(k.from_int(4), a2));
    let b4 = k.add(k.mul(k.from_int(2), a4), k.mul(a1, a3));
    let b6 = k.add(k.mul(a3, a3), k.mul(k.from_int(4), a6));
    let (c4, c2, c1) = (k.from_int(4), b2, k.mul(k.from_int(2), b4));
    if k.f == 1 {
        let p = k.p;
        let mut is_sq = vec![false; p as usize];
        for y in 0..p {
            is_sq[mul_mod(y, y, p) as usize] = true;
        }
        let mut n = 0u64;
        for x in 0..p {
            let v = (mul_mod((mul_mod((mul_mod(c4, x, p) + c2) % p, x, p) + c1) % p, x, p) + b6) % p;
            n += if v == 0 {
                1
            } else if is_sq[v as usize] {
                2
            } else {
                0
            };
        }
        return n;
    }
    let mut n = 0u64;
    for x in 0..k.q {
        let v = k.add(k.mul(k.add(k.mul(k.add(k.mul(c4, x), c2), x), c1), x), b6);
        n += (1 + k.chi(v)) as u64;
    }
    n
}

/// a_p at every good prime of norm ≤ bound, in (norm, HNF) order.
pub fn ap_list(e: &Curve, norm_bound: u64) -> Vec<ApRecord> {
    let primes = primes_up_to_norm(norm_bound);
    primes.par_iter().filter_map(|pr| count_points(e, pr).ok()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::fe;
    use crate::ideal::factor_rational_prime;

    fn ex412() -> Curve {
        Curve::from_ainvs([fe(1, 0, 1), fe(-1, 1, -1), fe(0, 0, 0), fe(1, 0, 0), fe(0, 0, 0)])
    }

    #[test]
    fn reduction_of_a() {
        let p5 = factor_rational_prime(5).iter().find(|p| p.f == 1).unwrap().clone();
        let r = reduce_element(&FieldElement::a(), &p5).unwrap();
        assert_eq!(modp::eval(&[1, 0, 4, 1], r, 5), 0);
        assert_eq!(reduce_element(&FieldElement::zero(), &p5).unwrap(), 0);
        let p2 = factor_rational_prime(2)[0].clone();
        assert_eq!(p2.residue_poly, vec![1, 0, 1, 1]);
        let k = ResidueField::for_prime(&p2);
        let x = reduce_element(&FieldElement::a(), &p2).unwrap();
        let x3 = k.mul(k.mul(x, x), x);
        assert_eq!(k.add(k.add(x3, k.mul(x, x)), 1), 0);
    }

    #[test]
    fn reduction_is_a_homomorphism() {
        for p in [5u64, 7, 11, 23, 59] {
            for pr in factor_rational_prime(p).iter() {
                let k = ResidueField::for_prime(pr);
                let x = fe(3, -7, 2);
                let y = FieldElement::from_ints(1, 4, -9).inv();
                if pr.valuation(&y).unwrap() < 0 {
                    continue;
                }
                let rx = reduce_element(&x, pr).unwrap();
                let ry = reduce_element(&y, pr).unwrap();
                assert_eq!(reduce_element(&(&x * &y), pr).unwrap(), k.mul(rx, ry));
                assert_eq!(reduce_element(&(&x + &y), pr).unwrap(), k.add(rx, ry));
            }
        }
    }

    #[test]
    fn p_in_denominator_at_split_prime() {
        let ps = factor_rational_prime(5);
        let (p, q) = (&ps[0], &ps[1]);
        let five = FieldElement::from_int(5);
        // 3π_Q/5 is Q-integral but has P-valuation −1
        let x = &(&q.generator * &FieldElement::from_int(3)) / &five;
        assert_eq!(p.valuation(&x), Some(-1));
        assert_eq!(reduce_element(&x, p), Err(Error::NonIntegralAtP));
        assert_eq!(q.valuation(&x), Some(0));
        let k = ResidueField::for_prime(q);
        let rx = reduce_element(&x, q).unwrap();
        let rp = reduce_element(&p.generator, q).unwrap();
        assert_eq!(k.mul(rx, rp), reduce_element(&(&x * &p.generator), q).unwrap());
        assert_ne!(rx, 0);
    }

    #[test]
    fn y2_x3_plus_1_over_f5() {
        let e = Curve::from_ints([0, 0, 0, 0, 1]);
        let p5 = factor_rational_prime(5).iter().find(|p| p.f == 1).unwrap().clone();
        let rec = count_points(&e, &p5).unwrap();
        assert_eq!((rec.point_count, rec.a_p), (6, 0));
    }

    #[test]
    fn example_frobenius_traces() {
        let e = ex412();
        let p2 = factor_rational_prime(2)[0].clone();
        let r = count_points(&e, &p2).unwrap();
        assert_eq!((r.point_count, r.a_p), (12, -3));
        let p17 = factor_rational_prime(17).iter().find(|p| p.f == 1).unwrap().clone();
        assert_eq!(count_points(&e, &p17).unwrap().a_p, -6);
        let p5 = factor_rational_prime(5).iter().find(|p| p.f == 1).unwrap().clone();
        assert_eq!(count_points(&e, &p5), Err(Error::BadReduction));
    }

    #[test]
    fn ap_list_hasse_and_bound() {
        let e = ex412();
        let l = ap_list(&e, 60);
        for r in &l {
            let q = r.prime.norm() as f64;
            assert!((r.a_p as f64).abs() <= 2.0 * q.sqrt());
            assert!(r.prime.norm() <= 60);
        }
        assert!(ap_list(&e, 4).iter().all(|r| r.prime.norm() <= 4));
        let norms: Vec<u64> = l.iter().map(|r| r.prime.norm()).collect();
        let mut sorted = norms.clone();
        sorted.sort();
        assert_eq!(norms, sorted);
    }

    #[test]
    fn table_and_slow_arithmetic_agree() {
        let p = factor_rational_prime(3)[0].clone();
        let k = ResidueField::for_prime(&p);
        for x in 0..k.q {
            for y in 0..k.q {
                assert_eq!(k.mul(x, y), k.mul_slow(x, y));
            }
        }
    }
}
