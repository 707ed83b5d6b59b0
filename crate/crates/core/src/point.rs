//! Points and the group law on long Weierstrass models.

use std::fmt;

use crate::curve::Curve;
use crate::field::FieldElement;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Point {
    Infinity,
    Affine(FieldElement, FieldElement),
}

impl Point {
    pub fn new(x: FieldElement, y: FieldElement) -> Self {
        Point::Affine(x, y)
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, Point::Infinity)
    }

    pub fn x(&self) -> Option<&FieldElement> {
        match self {
            Point::Affine(x, _) => Some(x),
            Point::Infinity => None,
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Infinity => f.write_str("O"),
            Point::Affine(x, y) => write!(f, "({x} : {y})"),
        }
    }
}

impl Curve {
    pub fn is_on_curve(&self, p: &Point) -> bool {
        match p {
            Point::Infinity => true,
            Point::Affine(x, y) => {
                let lhs = &(y * y) + &(&(&(&self.a1 * x) + &self.a3) * y);
                let rhs = &(&(&(&(x + &self.a2) * x) + &self.a4) * x) + &self.a6;
                lhs == rhs
            }
        }
    }

    pub fn neg_point(&self, p: &Point) -> Point {
        match p {
            Point::Infinity => Point::Infinity,
            Point::Affine(x, y) => Point::Affine(x.clone(), &(&(-y) - &(&self.a1 * x)) - &self.a3),
        }
    }

    pub fn add_points(&self, p: &Point, q: &Point) -> Point {
        let (x1, y1, x2, y2) = match (p, q) {
            (Point::Infinity, _) => return q.clone(),
            (_, Point::Infinity) => return p.clone(),
            (Point::Affine(x1, y1), Point::Affine(x2, y2)) => (x1, y1, x2, y2),
        };
        let (lam, nu) = if x1 == x2 {
            let den = &(&(y1 + y1) + &(&self.a1 * x1)) + &self.a3;
            if y1 != y2 || den.is_zero() {
                return Point::Infinity;
            }
            let f = FieldElement::from_int;
            let num = &(&(&(&(&f(3) * x1) * x1) + &(&(&f(2) * &self.a2) * x1)) + &self.a4) - &(&self.a1 * y1);
            let nnum = &(&(&(-&(&(x1 * x1) * x1)) + &(&self.a4 * x1)) + &(&f(2) * &self.a6)) - &(&self.a3 * y1);
            (&num / &den, &nnum / &den)
        } else {
            let dx = x2 - x1;
            (&(y2 - y1) / &dx, &(&(y1 * x2) - &(y2 * x1)) / &dx)
        };
        let x3 = &(&(&(&(&lam * &lam) + &(&self.a1 * &lam)) - &self.a2) - x1) - x2;
        let y3 = &(&(-&(&(&lam + &self.a1) * &x3)) - &nu) - &self.a3;
        Point::Affine(x3, y3)
    }

    pub fn mul_point(&self, n: i64, p: &Point) -> Point {
        let mut acc = Point::Infinity;
        let mut base = if n < 0 { self.neg_point(p) } else { p.clone() };
        let mut k = n.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add_points(&acc, &base);
            }
            base = self.add_points(&base, &base);
            k >>= 1;
        }
        acc
    }

    /// Order of p if it is at most `bound`.
    pub fn point_order(&self, p: &Point, bound: u64) -> Option<u64> {
        let mut q = p.clone();
        for n in 1..=bound {
            if q.is_infinity() {
                return Some(n);
            }
            q = self.add_points(&q, p);
        }
        None
    }
}
