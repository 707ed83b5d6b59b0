//! Polynomials over F, with factorization by Trager's norm method.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith::{big_mod_u64, inv_mod, mul_mod, next_prime};
use crate::field::FieldElement;
use crate::poly::modp;
use crate::poly::zfactor::factor_zpoly_with_hint;
use crate::poly::ZPoly;

/// Dense polynomial over F, constant term first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PolyOverF {
    coeffs: Vec<FieldElement>,
}

impl PolyOverF {
    pub fn new(mut coeffs: Vec<FieldElement>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        PolyOverF { coeffs }
    }

    pub fn zero() -> Self {
        PolyOverF { coeffs: Vec::new() }
    }

    pub fn constant(c: FieldElement) -> Self {
        Self::new(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(FieldElement::one())
    }

    pub fn x() -> Self {
        Self::new(vec![FieldElement::zero(), FieldElement::one()])
    }

    /// `X − r`
    pub fn linear(r: &FieldElement) -> Self {
        Self::new(vec![-r, FieldElement::one()])
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&x| FieldElement::from_int(x)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> FieldElement {
        self.coeffs.get(i).cloned().unwrap_or_else(FieldElement::zero)
    }

    pub fn lc(&self) -> FieldElement {
        self.coeffs.last().cloned().unwrap_or_else(FieldElement::zero)
    }

    pub fn is_monic(&self) -> bool {
        self.lc().is_one()
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() || self.is_monic() {
            return self.clone();
        }
        let inv = self.lc().inv();
        Self::new(self.coeffs.iter().map(|c| c * &inv).collect())
    }

    pub fn scale(&self, k: &FieldElement) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn eval(&self, x: &FieldElement) -> FieldElement {
        let mut acc = FieldElement::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c.scale_int(i as i64)).collect())
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// `self(X + c)`
    pub fn shift(&self, c: &FieldElement) -> Self {
        let lin = Self::new(vec![c.clone(), FieldElement::one()]);
        let mut acc = Self::zero();
        for k in self.coeffs.iter().rev() {
            acc = &(&acc * &lin) + &Self::constant(k.clone());
        }
        acc
    }

    pub fn div_rem(&self, d: &PolyOverF) -> (PolyOverF, PolyOverF) {
        let dd = d.degree().expect("division by zero polynomial");
        if self.is_zero() || self.deg() < dd {
            return (Self::zero(), self.clone());
        }
        let n = self.deg();
        let inv = d.lc().inv();
        let mut rem = self.coeffs.clone();
        let mut qv = vec![FieldElement::zero(); n - dd + 1];
        for i in (0..=n - dd).rev() {
            let t = &rem[i + dd] * &inv;
            if t.is_zero() {
                continue;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                rem[i + j] = &rem[i + j] - &(&t * dc);
            }
            qv[i] = t;
        }
        rem.truncate(dd);
        (Self::new(qv), Self::new(rem))
    }

    pub fn rem(&self, d: &PolyOverF) -> PolyOverF {
        self.div_rem(d).1
    }

    /// Monic gcd.
    pub fn gcd(&self, o: &PolyOverF) -> PolyOverF {
        let mut a = self.monic();
        let mut b = o.monic();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    /// Least common denominator of all coefficient coordinates.
    pub fn denominator(&self) -> BigInt {
        use num_integer::Integer;
        self.coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(&c.denominator()))
    }
}

impl fmt::Display for PolyOverF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            let cs = c.to_string();
            match i {
                0 => write!(f, "({cs})")?,
                _ => {
                    if !c.is_one() {
                        write!(f, "({cs})*")?;
                    }
                    f.write_str("X")?;
                    if i > 1 {
                        write!(f, "^{i}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl<'b> Add<&'b PolyOverF> for &PolyOverF {
    type Output = PolyOverF;
    fn add(self, o: &'b PolyOverF) -> PolyOverF {
        let n = self.coeffs.len().max(o.coeffs.len());
        PolyOverF::new((0..n).map(|i| &self.coeff(i) + &o.coeff(i)).collect())
    }
}

impl<'b> Sub<&'b PolyOverF> for &PolyOverF {
    type Output = PolyOverF;
    fn sub(self, o: &'b PolyOverF) -> PolyOverF {
        let n = self.coeffs.len().max(o.coeffs.len());
        PolyOverF::new((0..n).map(|i| &self.coeff(i) - &o.coeff(i)).collect())
    }
}

impl<'b> Mul<&'b PolyOverF> for &PolyOverF {
    type Output = PolyOverF;
    fn mul(self, o: &'b PolyOverF) -> PolyOverF {
        if self.is_zero() || o.is_zero() {
            return PolyOverF::zero();
        }
        let mut v = vec![FieldElement::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, x) in self.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in o.coeffs.iter().enumerate() {
                v[i + j] = &v[i + j] + &(x * y);
            }
        }
        PolyOverF::new(v)
    }
}

impl Neg for &PolyOverF {
    type Output = PolyOverF;
    fn neg(self) -> PolyOverF {
        PolyOverF::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

/// Yun's squarefree decomposition over F (characteristic zero).
pub fn squarefree_decomposition(f: &PolyOverF) -> Vec<(PolyOverF, u32)> {
    let mut out = Vec::new();
    if f.deg() == 0 {
        return out;
    }
    let f = f.monic();
    if squarefree_at_split_prime(&f) {
        out.push((f, 1));
        return out;
    }
    let d = f.derivative();
    let a0 = f.gcd(&d);
    let mut b = f.div_rem(&a0).0;
    let c = d.div_rem(&a0).0;
    let mut dd = &c - &b.derivative();
    let mut i = 1;
    while b.deg() > 0 {
        let a = b.gcd(&dd);
        let nb = b.div_rem(&a).0;
        let c = dd.div_rem(&a).0;
        b = nb.monic();
        dd = &c.scale(&a.lc().inv()) - &b.derivative();
        if a.deg() > 0 {
            out.push((a.monic(), i));
        }
        i += 1;
    }
    out
}

/// Reduce along a ↦ r mod p for a root r of x³ − x² + 1; squarefree there
/// (with the degree preserved) implies squarefree over F.
fn squarefree_at_split_prime(f: &PolyOverF) -> bool {
    let den = f.denominator();
    let mut p = 1000u64;
    let mut tried = 0;
    while tried < 6 && p < 100_000 {
        p = next_prime(p);
        if big_mod_u64(&den, p) == 0 {
            continue;
        }
        let roots = modp::roots(&modp::from_i64(&[1, 0, -1, 1], p), p);
        let Some(&r) = roots.first() else { continue };
        tried += 1;
        let red = |c: &FieldElement| {
            let mut acc = 0u64;
            for k in (0..3).rev() {
                let q = &c.coords()[k];
                let v = big_mod_u64(q.numer(), p);
                let w = inv_mod(big_mod_u64(q.denom(), p), p).expect("p prime to denominators");
                acc = (mul_mod(acc, r, p) + mul_mod(v, w, p)) % p;
            }
            acc
        };
        let fp: Vec<u64> = f.coeffs.iter().map(red).collect();
        if *fp.last().unwrap() == 0 {
            continue;
        }
        if modp::is_squarefree(&modp::trim(fp), p) {
            return true;
        }
    }
    false
}

/// Norm to Q[X] of an integral-coefficient polynomial: det of its multiplication matrix.
fn norm_zpoly(g: &PolyOverF) -> ZPoly {
    let mut entries: Vec<Vec<Vec<BigInt>>> = vec![vec![vec![BigInt::zero(); g.coeffs.len()]; 3]; 3];
    for (k, c) in g.coeffs.iter().enumerate() {
        let m = c.mul_matrix();
        for i in 0..3 {
            for j in 0..3 {
                entries[i][j][k] = m[i][j].to_integer();
            }
        }
    }
    let e: Vec<Vec<ZPoly>> = entries.into_iter().map(|row| row.into_iter().map(ZPoly::new).collect()).collect();
    let minor = |i1: usize, i2: usize, j1: usize, j2: usize| &(&e[i1][j1] * &e[i2][j2]) - &(&e[i1][j2] * &e[i2][j1]);
    let t0 = &e[0][0] * &minor(1, 2, 1, 2);
    let t1 = &e[0][1] * &minor(1, 2, 0, 2);
    let t2 = &e[0][2] * &minor(1, 2, 0, 1);
    &(&t0 - &t1) + &t2
}

fn is_squarefree_z(n: &ZPoly) -> bool {
    let lc = n.lc();
    let mut p = 1000u64;
    for _ in 0..6 {
        p = next_prime(p);
        if big_mod_u64(&lc, p) == 0 {
            continue;
        }
        let fp = modp::trim(n.coeffs().iter().map(|c| big_mod_u64(c, p)).collect());
        if modp::is_squarefree(&fp, p) {
            return true;
        }
    }
    let q = n.to_qpoly();
    q.gcd(&q.derivative()).deg() == 0
}

fn zpoly_to_polyf(h: &ZPoly) -> PolyOverF {
    PolyOverF::new(h.coeffs().iter().map(|c| FieldElement::from_bigint(c.clone())).collect())
}

/// Irreducible monic factors of a monic squarefree polynomial.
fn factor_squarefree(f: &PolyOverF) -> Vec<PolyOverF> {
    if f.deg() <= 1 {
        return vec![f.monic()];
    }
    let a = FieldElement::a();
    for s in [0i64, 1, -1, 2, -2, 3, -3, 4, -4, 5, -5, 6, -6, 7, -7] {
        let shift = a.scale_int(s);
        // g(X) = f(X − s·a)
        let g = f.shift(&-&shift);
        let den = g.denominator();
        let gi = g.scale(&FieldElement::from_bigint(den));
        let n = norm_zpoly(&gi);
        if !is_squarefree_z(&n) {
            continue;
        }
        let (_, hs) = factor_zpoly_with_hint(&n, 3);
        if hs.len() == 1 {
            return vec![f.monic()];
        }
        let mut out: Vec<PolyOverF> = hs.iter().map(|(h, _)| g.gcd(&zpoly_to_polyf(h)).shift(&shift).monic()).collect();
        out.sort();
        return out;
    }
    panic!("no squarefree norm shift found");
}

/// Factor into leading coefficient and monic irreducible factors with multiplicity.
pub fn factor_poly_over_f(f: &PolyOverF) -> (FieldElement, Vec<(PolyOverF, u32)>) {
    assert!(!f.is_zero(), "cannot factor zero");
    let mut out = Vec::new();
    for (g, e) in squarefree_decomposition(f) {
        for h in factor_squarefree(&g) {
            out.push((h, e));
        }
    }
    out.sort_by(|x, y| (x.0.deg(), &x.0).cmp(&(y.0.deg(), &y.0)));
    (f.lc(), out)
}

/// Roots in F with multiplicity, ascending.
pub fn roots_in_f(f: &PolyOverF) -> Vec<FieldElement> {
    if f.deg() == 0 {
        return Vec::new();
    }
    if f.deg() == 1 {
        let m = f.monic();
        return vec![-&m.coeff(0)];
    }
    let mut roots = Vec::new();
    for (h, e) in factor_poly_over_f(f).1 {
        if h.deg() == 1 {
            for _ in 0..e {
                roots.push(-&h.coeff(0));
            }
        }
    }
    roots.sort();
    roots
}

/// Rational-coefficient polynomial viewed over F.
pub fn from_rationals(c: &[BigRational]) -> PolyOverF {
    PolyOverF::new(c.iter().map(|x| FieldElement::from_rational(x.clone())).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::fe;

    fn product(fs: &[(PolyOverF, u32)]) -> PolyOverF {
        let mut acc = PolyOverF::one();
        for (g, e) in fs {
            acc = &acc * &g.pow(*e);
        }
        acc
    }

    #[test]
    fn difference_of_squares() {
        let a = FieldElement::a();
        let f = PolyOverF::new(vec![-&(&a * &a), FieldElement::zero(), FieldElement::one()]);
        let (_, fs) = factor_poly_over_f(&f);
        assert_eq!(fs.len(), 2);
        assert_eq!(product(&fs), f);
        let r = roots_in_f(&f);
        assert_eq!(r.len(), 2);
        assert!(r.contains(&a) && r.contains(&-&a));
    }

    #[test]
    fn defining_polynomial_has_root_a() {
        let f = PolyOverF::from_ints(&[1, 0, -1, 1]);
        let (_, fs) = factor_poly_over_f(&f);
        assert_eq!(fs.len(), 2);
        assert_eq!(fs[0].0, PolyOverF::linear(&FieldElement::a()));
        assert_eq!(fs[1].0.deg(), 2);
        assert_eq!(roots_in_f(&f), vec![FieldElement::a()]);
    }

    #[test]
    fn product_of_quadratics_recovered() {
        let q1 = PolyOverF::new(vec![fe(1, 2, -1), fe(0, 1, 1), fe(1, 0, 0)]);
        let q2 = PolyOverF::new(vec![fe(-3, 0, 2), fe(1, -1, 0), fe(1, 0, 0)]);
        let f = &q1 * &q2;
        let (_, fs) = factor_poly_over_f(&f);
        let mut got: Vec<PolyOverF> = fs.iter().map(|x| x.0.clone()).collect();
        got.sort();
        let mut want = vec![q1.clone(), q2.clone()];
        want.sort();
        // each quadratic may split further over F; check reconstruction and irreducibility
        assert_eq!(product(&fs), f);
        if got.iter().all(|g| g.deg() == 2) {
            assert_eq!(got, want);
        }
    }

    #[test]
    fn repeated_factors() {
        let l = PolyOverF::linear(&fe(2, -1, 0));
        let q = PolyOverF::from_ints(&[2, 0, 1]);
        let f = &(&l * &l) * &q;
        let (_, fs) = factor_poly_over_f(&f);
        assert_eq!(product(&fs), f);
        assert!(fs.contains(&(l, 2)));
    }
}
