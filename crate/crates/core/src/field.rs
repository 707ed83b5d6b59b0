//! Exact arithmetic in F = Q(a), a³ = a² − 1, on the power basis {1, a, a²}.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Real root of x³ − x² + 1.
pub const REAL_ROOT: f64 = -0.754_877_666_246_692_8;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct FieldElement {
    c: [BigRational; 3],
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// The complex root with positive imaginary part, as (re, im).
pub fn complex_root() -> (f64, f64) {
    let re = (1.0 - REAL_ROOT) / 2.0;
    let im = (-1.0 / REAL_ROOT - re * re).sqrt();
    (re, im)
}

struct EmbeddingData {
    // rows map coordinates to (real, re, im)
    inverse: [[f64; 3]; 3],
}

fn embedding_data() -> &'static EmbeddingData {
    static DATA: OnceLock<EmbeddingData> = OnceLock::new();
    DATA.get_or_init(|| {
        let r = REAL_ROOT;
        let (zr, zi) = complex_root();
        let z2r = zr * zr - zi * zi;
        let z2i = 2.0 * zr * zi;
        let m = [[1.0, r, r * r], [1.0, zr, z2r], [0.0, zi, z2i]];
        EmbeddingData { inverse: invert3(&m) }
    })
}

fn invert3(m: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    let mut inv = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let (a, b) = ((j + 1) % 3, (j + 2) % 3);
            let (c, d) = ((i + 1) % 3, (i + 2) % 3);
            inv[i][j] = (m[a][c] * m[b][d] - m[a][d] * m[b][c]) / det;
        }
    }
    inv
}

impl FieldElement {
    pub fn new(c0: BigRational, c1: BigRational, c2: BigRational) -> Self {
        FieldElement { c: [c0, c1, c2] }
    }

    pub fn from_ints(c0: i64, c1: i64, c2: i64) -> Self {
        FieldElement { c: [q(c0), q(c1), q(c2)] }
    }

    pub fn from_bigints(c: [BigInt; 3]) -> Self {
        let [c0, c1, c2] = c;
        FieldElement {
            c: [BigRational::from_integer(c0), BigRational::from_integer(c1), BigRational::from_integer(c2)],
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_ints(n, 0, 0)
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Self::from_rational(BigRational::from_integer(n))
    }

    pub fn from_rational(r: BigRational) -> Self {
        FieldElement { c: [r, BigRational::zero(), BigRational::zero()] }
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    /// The generator a.
    pub fn a() -> Self {
        Self::from_ints(0, 1, 0)
    }

    pub fn coords(&self) -> &[BigRational; 3] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.c[0].is_one() && self.c[1].is_zero() && self.c[2].is_zero()
    }

    pub fn is_integral(&self) -> bool {
        self.c.iter().all(|x| x.is_integer())
    }

    pub fn is_rational(&self) -> bool {
        self.c[1].is_zero() && self.c[2].is_zero()
    }

    /// Integer coordinates, if integral.
    pub fn int_coords(&self) -> Option<[BigInt; 3]> {
        if !self.is_integral() {
            return None;
        }
        Some([self.c[0].to_integer(), self.c[1].to_integer(), self.c[2].to_integer()])
    }

    /// Least positive integer d with d·x integral.
    pub fn denominator(&self) -> BigInt {
        self.c.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        FieldElement { c: [&self.c[0] * k, &self.c[1] * k, &self.c[2] * k] }
    }

    pub fn scale_int(&self, k: i64) -> Self {
        self.scale(&q(k))
    }

    /// Columns are x, x·a, x·a² on the power basis.
    pub fn mul_matrix(&self) -> [[BigRational; 3]; 3] {
        let x = self;
        let xa = x * &FieldElement::a();
        let xaa = &xa * &FieldElement::a();
        let cols = [x.c.clone(), xa.c, xaa.c];
        let mut m: [[BigRational; 3]; 3] = Default::default();
        for (j, col) in cols.iter().enumerate() {
            for i in 0..3 {
                m[i][j] = col[i].clone();
            }
        }
        m
    }

    pub fn norm(&self) -> BigRational {
        let m = self.mul_matrix();
        &m[0][0] * (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1]) - &m[0][1] * (&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0])
            + &m[0][2] * (&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0])
    }

    pub fn trace(&self) -> BigRational {
        let m = self.mul_matrix();
        &m[0][0] + &m[1][1] + &m[2][2]
    }

    /// Characteristic polynomial X³ + k2 X² + k1 X + k0 as [k0, k1, k2, 1].
    pub fn charpoly(&self) -> [BigRational; 4] {
        let m = self.mul_matrix();
        let tr = &m[0][0] + &m[1][1] + &m[2][2];
        let minors = &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0] + &m[0][0] * &m[2][2] - &m[0][2] * &m[2][0]
            + &m[1][1] * &m[2][2]
            - &m[1][2] * &m[2][1];
        [-self.norm(), minors, -tr, BigRational::one()]
    }

    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroInversion);
        }
        if self.is_rational() {
            return Ok(Self::from_rational(self.c[0].recip()));
        }
        // first column of the adjugate divided by det
        let m = self.mul_matrix();
        let det = self.norm();
        let c0 = &m[1][1] * &m[2][2] - &m[1][2] * &m[2][1];
        let c1 = -(&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0]);
        let c2 = &m[1][0] * &m[2][1] - &m[1][1] * &m[2][0];
        Ok(FieldElement { c: [c0 / &det, c1 / &det, c2 / &det] })
    }

    pub fn inv(&self) -> Self {
        self.inverse().expect("inverse of zero")
    }

    pub fn pow(&self, e: i64) -> Self {
        if e < 0 {
            return self.inv().pow(-e);
        }
        let mut base = self.clone();
        let mut acc = Self::one();
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn to_f64_coords(&self) -> [f64; 3] {
        let f = |x: &BigRational| x.to_f64().unwrap_or(f64::NAN);
        [f(&self.c[0]), f(&self.c[1]), f(&self.c[2])]
    }

    /// (real embedding, complex embedding as (re, im)).
    pub fn embeddings(&self) -> (f64, (f64, f64)) {
        let [c0, c1, c2] = self.to_f64_coords();
        let r = REAL_ROOT;
        let (zr, zi) = complex_root();
        let z2r = zr * zr - zi * zi;
        let z2i = 2.0 * zr * zi;
        (c0 + c1 * r + c2 * r * r, (c0 + c1 * zr + c2 * z2r, c1 * zi + c2 * z2i))
    }

    /// T₂(x) = Σ |σ(x)|² over the three complex embeddings.
    pub fn t2(&self) -> f64 {
        let (r, (zr, zi)) = self.embeddings();
        r * r + 2.0 * (zr * zr + zi * zi)
    }

    /// Nearest integral element to the given embedding values.
    pub fn from_embeddings_rounded(real: f64, complex: (f64, f64)) -> Option<Self> {
        let inv = &embedding_data().inverse;
        let v = [real, complex.0, complex.1];
        let mut out = [BigInt::zero(), BigInt::zero(), BigInt::zero()];
        for i in 0..3 {
            let s = inv[i][0] * v[0] + inv[i][1] * v[1] + inv[i][2] * v[2];
            if !s.is_finite() {
                return None;
            }
            out[i] = BigInt::from_f64(s.round())?;
        }
        Some(Self::from_bigints(out))
    }

    /// Square root in F, if one exists.
    pub fn sqrt(&self) -> Option<Self> {
        if self.is_zero() {
            return Some(Self::zero());
        }
        let n = self.norm();
        if n.is_negative() {
            // N(y²) = N(y)² ≥ 0
            return None;
        }
        if crate::arith::exact_root(n.numer(), 2).is_none() || crate::arith::exact_root(n.denom(), 2).is_none() {
            return None;
        }
        let d = self.denominator();
        let scaled = self.scale(&BigRational::from_integer(&d * &d));
        let (r, (zr, zi)) = scaled.embeddings();
        if r >= 0.0 && scaled.c.iter().all(|x| x.abs() < BigRational::from_integer(BigInt::from(1u64 << 50))) {
            let sr = r.sqrt();
            let mag = (zr * zr + zi * zi).sqrt().sqrt();
            let arg = zi.atan2(zr) / 2.0;
            let sc = (mag * arg.cos(), mag * arg.sin());
            for y in [Self::from_embeddings_rounded(sr, sc), Self::from_embeddings_rounded(-sr, sc)].into_iter().flatten() {
                if &y * &y == scaled {
                    return Some(y.scale(&BigRational::new(BigInt::one(), d)));
                }
            }
        }
        let poly = crate::polyf::PolyOverF::new(vec![-self.clone(), Self::zero(), Self::one()]);
        crate::polyf::roots_in_f(&poly).into_iter().max()
    }

    /// Compact text form on the power basis, e.g. "-9+a^2".
    pub fn to_compact_string(&self) -> String {
        let mut out = String::new();
        for (i, c) in self.c.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if neg {
                out.push('-');
            } else if !out.is_empty() {
                out.push('+');
            }
            let coef = if mag.is_integer() { mag.to_integer().to_string() } else { format!("{}/{}", mag.numer(), mag.denom()) };
            match i {
                0 => out.push_str(&coef),
                _ => {
                    if !mag.is_one() {
                        out.push_str(&coef);
                        out.push('*');
                    }
                    out.push('a');
                    if i == 2 {
                        out.push_str("^2");
                    }
                }
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_compact_string())
    }
}

fn parse_rational(s: &str) -> Option<BigRational> {
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.parse().ok()?;
        let d: BigInt = d.parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(BigRational::new(n, d))
    } else {
        Some(BigRational::from_integer(s.parse().ok()?))
    }
}

fn parse_term(t: &str) -> Option<FieldElement> {
    // coef? '*'? ('a' ('^' k)?)?
    let (coef, var) = match t.find('a') {
        Some(i) => (&t[..i], Some(&t[i + 1..])),
        None => (t, None),
    };
    let coef = coef.strip_suffix('*').unwrap_or(coef);
    let c = if coef.is_empty() {
        var?;
        BigRational::one()
    } else {
        parse_rational(coef)?
    };
    let power = match var {
        None => 0,
        Some("") => 1,
        Some(rest) => rest.strip_prefix('^')?.parse::<i64>().ok()?,
    };
    Some(FieldElement::a().pow(power).scale(&c))
}

impl FromStr for FieldElement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let err = || Error::parse(s.to_string(), "not a field element");
        let mut t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        while t.starts_with('(') && t.ends_with(')') {
            t = t[1..t.len() - 1].to_string();
        }
        if t.is_empty() {
            return Err(err());
        }
        let mut acc = FieldElement::zero();
        let mut start = 0;
        let bytes = t.as_bytes();
        let mut i = 0;
        let mut terms = Vec::new();
        while i <= bytes.len() {
            let boundary = i == bytes.len() || ((bytes[i] == b'+' || bytes[i] == b'-') && i > start && bytes[i - 1] != b'^');
            if boundary {
                terms.push(&t[start..i]);
                start = i;
            }
            i += 1;
        }
        for term in terms {
            let (sign, body) = match term.as_bytes().first() {
                Some(b'+') => (1, &term[1..]),
                Some(b'-') => (-1, &term[1..]),
                _ => (1, term),
            };
            let v = parse_term(body).ok_or_else(err)?;
            acc = if sign < 0 { &acc - &v } else { &acc + &v };
        }
        Ok(acc)
    }
}

fn mul_raw(x: &[BigRational; 3], y: &[BigRational; 3]) -> [BigRational; 3] {
    let p0 = &x[0] * &y[0];
    let p1 = &x[0] * &y[1] + &x[1] * &y[0];
    let p2 = &x[0] * &y[2] + &x[1] * &y[1] + &x[2] * &y[0];
    let p3 = &x[1] * &y[2] + &x[2] * &y[1];
    let p4 = &x[2] * &y[2];
    // a³ = a² − 1, a⁴ = a² − a − 1
    [&p0 - &p3 - &p4, &p1 - &p4, p2 + p3 + p4]
}

impl<'b> Add<&'b FieldElement> for &FieldElement {
    type Output = FieldElement;
    fn add(self, o: &'b FieldElement) -> FieldElement {
        FieldElement { c: [&self.c[0] + &o.c[0], &self.c[1] + &o.c[1], &self.c[2] + &o.c[2]] }
    }
}

impl<'b> Sub<&'b FieldElement> for &FieldElement {
    type Output = FieldElement;
    fn sub(self, o: &'b FieldElement) -> FieldElement {
        FieldElement { c: [&self.c[0] - &o.c[0], &self.c[1] - &o.c[1], &self.c[2] - &o.c[2]] }
    }
}

impl<'b> Mul<&'b FieldElement> for &FieldElement {
    type Output = FieldElement;
    fn mul(self, o: &'b FieldElement) -> FieldElement {
        FieldElement { c: mul_raw(&self.c, &o.c) }
    }
}

impl<'b> Div<&'b FieldElement> for &FieldElement {
    type Output = FieldElement;
    fn div(self, o: &'b FieldElement) -> FieldElement {
        self * &o.inv()
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement { c: [-&self.c[0], -&self.c[1], -&self.c[2]] }
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $m(self, o: FieldElement) -> FieldElement {
                (&self).$m(&o)
            }
        }
        impl<'b> $tr<&'b FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $m(self, o: &'b FieldElement) -> FieldElement {
                (&self).$m(o)
            }
        }
        impl $tr<FieldElement> for &FieldElement {
            type Output = FieldElement;
            fn $m(self, o: FieldElement) -> FieldElement {
                self.$m(&o)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl From<i64> for FieldElement {
    fn from(n: i64) -> Self {
        FieldElement::from_int(n)
    }
}

/// Shorthand for `c0 + c1·a + c2·a²`.
pub fn fe(c0: i64, c1: i64, c2: i64) -> FieldElement {
    FieldElement::from_ints(c0, c1, c2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly_oracle(x: &[i64; 3], y: &[i64; 3]) -> [i64; 3] {
        // multiply in Z[x] then long-divide by x³ − x² + 1
        let mut p = [0i64; 5];
        for i in 0..3 {
            for j in 0..3 {
                p[i + j] += x[i] * y[j];
            }
        }
        for d in (3..5).rev() {
            let c = p[d];
            p[d] = 0;
            p[d - 1] += c;
            p[d - 3] -= c;
        }
        [p[0], p[1], p[2]]
    }

    #[test]
    fn defining_relation() {
        assert_eq!(&fe(0, 1, 0) * &fe(0, 0, 1), fe(-1, 0, 1));
        let x = fe(3, -2, 7);
        assert_eq!(&x * &FieldElement::one(), x);
    }

    #[test]
    fn product_matches_long_division() {
        let x = [1, 0, 1];
        let y = [-1, 1, 0];
        let r = poly_oracle(&x, &y);
        assert_eq!(&fe(1, 0, 1) * &fe(-1, 1, 0), fe(r[0], r[1], r[2]));
    }

    #[test]
    fn inverses() {
        // a·(a − a²) = a² − a³ = 1
        assert_eq!(fe(0, 1, 0).inv(), fe(0, 1, -1));
        assert!((&fe(0, 1, 0) * &fe(0, 1, -1)).is_one());
        assert_eq!(FieldElement::one().inv(), FieldElement::one());
        assert_eq!(fe(2, 0, 0).inv(), FieldElement::from_rational(BigRational::new(1.into(), 2.into())));
        assert_eq!(FieldElement::zero().inverse(), Err(Error::ZeroInversion));
    }

    #[test]
    fn norm_trace_charpoly() {
        let a = FieldElement::a();
        assert_eq!(a.charpoly(), [q(1), q(0), q(-1), q(1)]);
        assert_eq!(a.norm(), q(-1));
        assert_eq!(a.trace(), q(1));
        assert_eq!(fe(7, 0, 0).norm(), q(343));
        assert_eq!(fe(7, 0, 0).trace(), q(21));
        assert_eq!(fe(-9, 0, 1).norm().abs(), q(665));
        // Cayley–Hamilton
        let x = fe(2, -3, 5);
        let cp = x.charpoly();
        let mut acc = FieldElement::zero();
        for (i, k) in cp.iter().enumerate() {
            acc = &acc + &x.pow(i as i64).scale(k);
        }
        assert!(acc.is_zero());
    }

    #[test]
    fn parse_and_print() {
        for (s, v) in [
            ("a^2-9", fe(-9, 0, 1)),
            ("14*a-3", fe(-3, 14, 0)),
            ("-a^2+a-1", fe(-1, 1, -1)),
            ("(3a^2 - 14a + 1)", fe(1, -14, 3)),
            ("0", fe(0, 0, 0)),
            ("a^3", fe(-1, 0, 1)),
        ] {
            assert_eq!(s.parse::<FieldElement>().unwrap(), v, "{s}");
            assert_eq!(v.to_string().parse::<FieldElement>().unwrap(), v);
        }
        assert_eq!(fe(-9, 0, 1).to_string(), "-9+a^2");
        let half: FieldElement = "1/2*a".parse().unwrap();
        assert_eq!(half.to_string(), "1/2*a");
        assert!("a^".parse::<FieldElement>().is_err());
        assert!("x+1".parse::<FieldElement>().is_err());
    }

    #[test]
    fn t2_and_embeddings() {
        let (r, _) = FieldElement::a().embeddings();
        assert!((r - REAL_ROOT).abs() < 1e-15);
        let x = fe(3, -1, 2);
        let (xr, xc) = x.embeddings();
        let back = FieldElement::from_embeddings_rounded(xr, xc).unwrap();
        assert_eq!(back, x);
        assert!((FieldElement::one().t2() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn square_roots() {
        let y = fe(5, -7, 3);
        let s = (&y * &y).sqrt().unwrap();
        assert!(s == y || s == -&y);
        assert!(fe(2, 0, 0).sqrt().is_none());
        assert!(FieldElement::a().sqrt().is_none());
    }
}
