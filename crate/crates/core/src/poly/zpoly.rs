//! Dense univariate polynomials over Z and Q.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Polynomial with integer coefficients, constant term first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ZPoly {
    coeffs: Vec<BigInt>,
}

impl ZPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        ZPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        ZPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::from_i64(&[1])
    }

    /// `X`
    pub fn x() -> Self {
        Self::from_i64(&[0, 1])
    }

    pub fn monomial(c: BigInt, deg: usize) -> Self {
        let mut v = vec![BigInt::zero(); deg + 1];
        v[deg] = c;
        Self::new(v)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn lc(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn is_monic(&self) -> bool {
        self.lc().is_one()
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in &self.coeffs {
            g = g.gcd(c);
        }
        if self.lc().is_negative() {
            -g
        } else {
            g
        }
    }

    /// Primitive part with positive leading coefficient.
    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let c = self.content();
        Self::new(self.coeffs.iter().map(|x| x / &c).collect())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide over Z.
    pub fn div_exact(&self, d: &ZPoly) -> Option<ZPoly> {
        let dd = d.degree()?;
        if self.is_zero() {
            return Some(Self::zero());
        }
        let n = self.deg();
        if n < dd {
            return None;
        }
        let lc = d.lc();
        let mut rem = self.coeffs.clone();
        let mut q = vec![BigInt::zero(); n - dd + 1];
        for i in (0..=n - dd).rev() {
            let top = &rem[i + dd];
            if top.is_zero() {
                continue;
            }
            let (qi, r) = top.div_rem(&lc);
            if !r.is_zero() {
                return None;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                rem[i + j] -= &qi * dc;
            }
            q[i] = qi;
        }
        if rem.iter().any(|c| !c.is_zero()) {
            return None;
        }
        Some(Self::new(q))
    }

    pub fn to_qpoly(&self) -> QPoly {
        QPoly::new(self.coeffs.iter().map(|c| BigRational::from_integer(c.clone())).collect())
    }

    /// `P(X^r)`
    pub fn compose_power(&self, r: usize) -> Self {
        let mut v = vec![BigInt::zero(); self.deg() * r + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            v[i * r] = c.clone();
        }
        Self::new(v)
    }

    pub fn max_abs_coeff(&self) -> BigInt {
        self.coeffs.iter().map(|c| c.abs()).max().unwrap_or_else(BigInt::zero)
    }
}

impl Add for &ZPoly {
    type Output = ZPoly;
    fn add(self, o: &ZPoly) -> ZPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        ZPoly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
}

impl Sub for &ZPoly {
    type Output = ZPoly;
    fn sub(self, o: &ZPoly) -> ZPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        ZPoly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }
}

impl Mul for &ZPoly {
    type Output = ZPoly;
    fn mul(self, o: &ZPoly) -> ZPoly {
        if self.is_zero() || o.is_zero() {
            return ZPoly::zero();
        }
        let mut v = vec![BigInt::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        ZPoly::new(v)
    }
}

impl Neg for &ZPoly {
    type Output = ZPoly;
    fn neg(self) -> ZPoly {
        ZPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl fmt::Display for ZPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            first = false;
            match i {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{mag}*")?;
                    }
                    if i == 1 {
                        write!(f, "X")?;
                    } else {
                        write!(f, "X^{i}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Polynomial with rational coefficients, constant term first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QPoly {
    coeffs: Vec<BigRational>,
}

impl QPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        QPoly { coeffs }
    }

    pub fn zero() -> Self {
        QPoly { coeffs: Vec::new() }
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

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn lc(&self) -> BigRational {
        self.coeffs.last().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let l = self.lc();
        Self::new(self.coeffs.iter().map(|c| c / &l).collect())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn div_rem(&self, d: &QPoly) -> (QPoly, QPoly) {
        let dd = d.degree().expect("division by zero polynomial");
        if self.deg() < dd || self.is_zero() {
            return (QPoly::zero(), self.clone());
        }
        let n = self.deg();
        let inv = d.lc().recip();
        let mut rem = self.coeffs.clone();
        let mut q = vec![BigRational::zero(); n - dd + 1];
        for i in (0..=n - dd).rev() {
            let t = &rem[i + dd] * &inv;
            if t.is_zero() {
                continue;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                rem[i + j] -= &t * dc;
            }
            q[i] = t;
        }
        rem.truncate(dd);
        (QPoly::new(q), QPoly::new(rem))
    }

    /// Monic gcd.
    pub fn gcd(&self, o: &QPoly) -> QPoly {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    /// Scale to a primitive integer polynomial with positive leading coefficient.
    pub fn to_primitive_zpoly(&self) -> ZPoly {
        let mut l = BigInt::one();
        for c in &self.coeffs {
            l = l.lcm(c.denom());
        }
        ZPoly::new(self.coeffs.iter().map(|c| (c * BigRational::from_integer(l.clone())).to_integer()).collect())
            .primitive_part()
    }
}

impl Mul for &QPoly {
    type Output = QPoly;
    fn mul(self, o: &QPoly) -> QPoly {
        if self.is_zero() || o.is_zero() {
            return QPoly::zero();
        }
        let mut v = vec![BigRational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        QPoly::new(v)
    }
}

/// Determinant of a square integer matrix by fraction-free elimination.
pub fn det_bareiss(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// Resultant of two integer polynomials via the Sylvester matrix.
pub fn resultant(f: &ZPoly, g: &ZPoly) -> BigInt {
    let (Some(m), Some(n)) = (f.degree(), g.degree()) else {
        return BigInt::zero();
    };
    if m == 0 && n == 0 {
        return BigInt::one();
    }
    if m == 0 {
        return f.lc().pow(n as u32);
    }
    if n == 0 {
        return g.lc().pow(m as u32);
    }
    let size = m + n;
    let mut mat = vec![vec![BigInt::zero(); size]; size];
    for i in 0..n {
        for j in 0..=m {
            mat[i][i + j] = f.coeff(m - j);
        }
    }
    for i in 0..m {
        for j in 0..=n {
            mat[n + i][i + j] = g.coeff(n - j);
        }
    }
    det_bareiss(mat)
}

/// Discriminant `(-1)^(n(n-1)/2) res(f, f') / lc(f)`.
pub fn discriminant(f: &ZPoly) -> BigInt {
    let n = f.deg();
    let r = resultant(f, &f.derivative()) / f.lc();
    if (n * (n.saturating_sub(1)) / 2) % 2 == 1 {
        -r
    } else {
        r
    }
}

/// Interpolate integer-valued data at nodes `0, 1, ..., n` into an integer polynomial.
pub fn interpolate_integer(values: &[BigInt]) -> ZPoly {
    // Newton forward differences keep everything integral up to the final factorials.
    let n = values.len();
    let mut diffs: Vec<BigInt> = values.to_vec();
    let mut newton = Vec::with_capacity(n);
    for k in 0..n {
        newton.push(diffs[0].clone());
        for i in 0..n - k - 1 {
            diffs[i] = &diffs[i + 1] - &diffs[i];
        }
    }
    // sum_k newton[k] * binom(X, k)
    let mut acc = QPoly::zero();
    let mut basis = QPoly::new(vec![BigRational::one()]);
    let mut fact = BigInt::one();
    for (k, c) in newton.iter().enumerate() {
        if k > 0 {
            fact *= BigInt::from(k);
            let factor = QPoly::new(vec![
                BigRational::from_integer(BigInt::from(-(k as i64 - 1))),
                BigRational::one(),
            ]);
            basis = &basis * &factor;
        }
        let scale = BigRational::new(c.clone(), fact.clone());
        let term = QPoly::new(basis.coeffs().iter().map(|b| b * &scale).collect());
        let len = acc.coeffs().len().max(term.coeffs().len());
        acc = QPoly::new((0..len).map(|i| acc.coeff(i) + term.coeff(i)).collect());
    }
    ZPoly::new(
        acc.coeffs()
            .iter()
            .map(|c| {
                assert!(c.is_integer(), "interpolated polynomial is not integral");
                c.to_integer()
            })
            .collect(),
    )
}
