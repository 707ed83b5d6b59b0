//! Long Weierstrass models y² + a1xy + a3y = x³ + a2x² + a4x + a6 over F.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::polyf::{roots_in_f, PolyOverF};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Curve {
    pub a1: FieldElement,
    pub a2: FieldElement,
    pub a3: FieldElement,
    pub a4: FieldElement,
    pub a6: FieldElement,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Invariants {
    pub b2: FieldElement,
    pub b4: FieldElement,
    pub b6: FieldElement,
    pub b8: FieldElement,
    pub c4: FieldElement,
    pub c6: FieldElement,
    pub disc: FieldElement,
}

impl Invariants {
    pub fn j(&self) -> Result<FieldElement> {
        if self.disc.is_zero() {
            return Err(Error::SingularCurve);
        }
        Ok(&(&(&self.c4 * &self.c4) * &self.c4) / &self.disc)
    }
}

/// Change of variables x = u²x' + r, y = u³y' + su²x' + t.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Transformation {
    pub u: FieldElement,
    pub r: FieldElement,
    pub s: FieldElement,
    pub t: FieldElement,
}

impl Transformation {
    pub fn identity() -> Self {
        Transformation { u: FieldElement::one(), r: FieldElement::zero(), s: FieldElement::zero(), t: FieldElement::zero() }
    }

    pub fn new(u: FieldElement, r: FieldElement, s: FieldElement, t: FieldElement) -> Self {
        Transformation { u, r, s, t }
    }

    pub fn scaling(u: FieldElement) -> Self {
        Transformation { u, ..Self::identity() }
    }

    pub fn shift(r: FieldElement, s: FieldElement, t: FieldElement) -> Self {
        Transformation { u: FieldElement::one(), r, s, t }
    }

    /// `self` followed by `o`.
    pub fn compose(&self, o: &Transformation) -> Transformation {
        let u2 = &self.u * &self.u;
        Transformation {
            u: &self.u * &o.u,
            r: &self.r + &(&u2 * &o.r),
            s: &self.s + &(&self.u * &o.s),
            t: &(&self.t + &(&(&u2 * &self.s) * &o.r)) + &(&(&u2 * &self.u) * &o.t),
        }
    }

    pub fn inverse(&self) -> Transformation {
        let ui = self.u.inv();
        let ui2 = &ui * &ui;
        Transformation {
            u: ui.clone(),
            r: -&(&self.r * &ui2),
            s: -&(&self.s * &ui),
            t: &(&(&self.r * &self.s) - &self.t) * &(&ui2 * &ui),
        }
    }
}

impl Curve {
    pub fn new(a1: FieldElement, a2: FieldElement, a3: FieldElement, a4: FieldElement, a6: FieldElement) -> Self {
        Curve { a1, a2, a3, a4, a6 }
    }

    pub fn from_ainvs(v: [FieldElement; 5]) -> Self {
        let [a1, a2, a3, a4, a6] = v;
        Curve { a1, a2, a3, a4, a6 }
    }

    pub fn from_ints(v: [i64; 5]) -> Self {
        Self::from_ainvs(v.map(FieldElement::from_int))
    }

    pub fn ainvs(&self) -> [&FieldElement; 5] {
        [&self.a1, &self.a2, &self.a3, &self.a4, &self.a6]
    }

    pub fn invariants(&self) -> Invariants {
        let (a1, a2, a3, a4, a6) = (&self.a1, &self.a2, &self.a3, &self.a4, &self.a6);
        let f = FieldElement::from_int;
        let b2 = &(a1 * a1) + &(&f(4) * a2);
        let b4 = &(&f(2) * a4) + &(a1 * a3);
        let b6 = &(a3 * a3) + &(&f(4) * a6);
        let b8 = &(&(&(&(&(a1 * a1) * a6) + &(&(&f(4) * a2) * a6)) - &(&(a1 * a3) * a4)) + &(&(a2 * a3) * a3))
            - &(a4 * a4);
        let c4 = &(&b2 * &b2) - &(&f(24) * &b4);
        let c6 = &(&(-&(&(&b2 * &b2) * &b2)) + &(&(&f(36) * &b2) * &b4)) - &(&f(216) * &b6);
        let disc = &(&(&(-&(&(&b2 * &b2) * &b8)) - &(&f(8) * &(&(&b4 * &b4) * &b4))) - &(&f(27) * &(&b6 * &b6)))
            + &(&(&(&f(9) * &b2) * &b4) * &b6);
        Invariants { b2, b4, b6, b8, c4, c6, disc }
    }

    pub fn discriminant(&self) -> FieldElement {
        self.invariants().disc
    }

    pub fn j_invariant(&self) -> Result<FieldElement> {
        self.invariants().j()
    }

    pub fn is_singular(&self) -> bool {
        self.discriminant().is_zero()
    }

    pub fn is_integral(&self) -> bool {
        self.ainvs().iter().all(|x| x.is_integral())
    }

    pub fn apply(&self, t: &Transformation) -> Curve {
        let (a1, a2, a3, a4, a6) = (&self.a1, &self.a2, &self.a3, &self.a4, &self.a6);
        let (r, s, tt) = (&t.r, &t.s, &t.t);
        let f = FieldElement::from_int;
        let ui = t.u.inv();
        let ui2 = &ui * &ui;
        let ui3 = &ui2 * &ui;
        let ui4 = &ui2 * &ui2;
        let ui6 = &ui3 * &ui3;
        let n1 = a1 + &(&f(2) * s);
        let n2 = &(&(a2 - &(s * a1)) + &(&f(3) * r)) - &(s * s);
        let n3 = &(a3 + &(r * a1)) + &(&f(2) * tt);
        let n4 = &(&(&(&(a4 - &(s * a3)) + &(&(&f(2) * r) * a2)) - &(&(tt + &(r * s)) * a1)) + &(&(&f(3) * r) * r))
            - &(&(&f(2) * s) * tt);
        let r2 = r * r;
        let n6 = &(&(&(&(&(a6 + &(r * a4)) + &(&r2 * a2)) + &(&r2 * r)) - &(tt * a3)) - &(tt * tt)) - &(&(r * tt) * a1);
        Curve { a1: &n1 * &ui, a2: &n2 * &ui2, a3: &n3 * &ui3, a4: &n4 * &ui4, a6: &n6 * &ui6 }
    }

    /// Some transformation T with self.apply(T) == o, if the curves are isomorphic over F.
    pub fn is_isomorphic(&self, o: &Curve) -> Option<Transformation> {
        let i1 = self.invariants();
        let i2 = o.invariants();
        if i1.disc.is_zero() || i2.disc.is_zero() || i1.j().ok()? != i2.j().ok()? {
            return None;
        }
        // c4' = c4/u⁴, c6' = c6/u⁶
        let us: Vec<FieldElement> = if i1.c4.is_zero() {
            nth_roots(&(&i1.c6 / &i2.c6), 6)
        } else if i1.c6.is_zero() {
            nth_roots(&(&i1.c4 / &i2.c4), 4)
        } else {
            let u2 = &(&i1.c6 * &i2.c4) / &(&i1.c4 * &i2.c6);
            nth_roots(&u2, 2)
        };
        let half = FieldElement::from_rational(BigRational::new(BigInt::one(), BigInt::from(2)));
        let third = FieldElement::from_rational(BigRational::new(BigInt::one(), BigInt::from(3)));
        for u in us {
            let u2 = &u * &u;
            let s = &(&(&u * &o.a1) - &self.a1) * &half;
            let r = &(&(&(&(&u2 * &o.a2) - &self.a2) + &(&s * &self.a1)) + &(&s * &s)) * &third;
            let t = &(&(&(&u2 * &u) * &o.a3) - &(&self.a3 + &(&r * &self.a1))) * &half;
            let tr = Transformation { u, r, s, t };
            if &self.apply(&tr) == o {
                return Some(tr);
            }
        }
        None
    }

    /// Integral model obtained by scaling with u = 1/k for a rational integer k.
    pub fn integral_model(&self) -> (Curve, Transformation) {
        let mut k = BigInt::one();
        for x in self.ainvs() {
            k = num_integer::Integer::lcm(&k, &x.denominator());
        }
        if k.is_one() {
            return (self.clone(), Transformation::identity());
        }
        let t = Transformation::scaling(FieldElement::from_bigint(k).inv());
        (self.apply(&t), t)
    }

    /// Compact display, e.g. "[a^2+1,-a^2+a-1,0,1,0]".
    pub fn to_string_with(&self, sep: &str) -> String {
        let v: Vec<String> = self.ainvs().iter().map(|x| x.to_string()).collect();
        format!("[{}]", v.join(sep))
    }
}

fn nth_roots(x: &FieldElement, n: u32) -> Vec<FieldElement> {
    let mut c = vec![FieldElement::zero(); n as usize + 1];
    c[0] = -x;
    c[n as usize] = FieldElement::one();
    let mut r = roots_in_f(&PolyOverF::new(c));
    r.dedup();
    r
}

impl fmt::Display for Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_string_with(","))
    }
}

impl FromStr for Curve {
    type Err = Error;

    /// Five field elements separated by ',' or ';', optionally bracketed.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().trim_start_matches('[').trim_end_matches(']');
        let parts: Vec<&str> = t.split([',', ';']).map(str::trim).collect();
        if parts.len() != 5 {
            return Err(Error::parse(s.to_string(), "expected five coefficients"));
        }
        let mut v = Vec::with_capacity(5);
        for p in parts {
            v.push(p.parse::<FieldElement>()?);
        }
        Ok(Curve::from_ainvs(v.try_into().unwrap()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::fe;

    fn ex412() -> Curve {
        Curve::from_ainvs([fe(1, 0, 1), fe(-1, 1, -1), fe(0, 0, 0), fe(1, 0, 0), fe(0, 0, 0)])
    }

    #[test]
    fn j_zero_curve() {
        let e = Curve::from_ints([0, 0, 0, 0, 1]);
        assert_eq!(e.discriminant(), FieldElement::from_int(-432));
        assert!(e.j_invariant().unwrap().is_zero());
        assert_eq!(Curve::from_ints([0, 0, 0, 0, 0]).j_invariant(), Err(Error::SingularCurve));
    }

    #[test]
    fn example_discriminant() {
        let e = ex412();
        let d = e.discriminant();
        assert_eq!(d, fe(-43, -25, 12));
        assert_eq!(d.norm(), BigRational::from_integer(BigInt::from(-67375)));
        let i = e.invariants();
        let lhs = &(&(&i.c4 * &i.c4) * &i.c4) - &(&i.c6 * &i.c6);
        assert_eq!(lhs, &FieldElement::from_int(1728) * &i.disc);
        assert_eq!(&FieldElement::from_int(4) * &i.b8, &(&i.b2 * &i.b6) - &(&i.b4 * &i.b4));
    }

    #[test]
    fn transformation_laws() {
        let e = ex412();
        let t1 = Transformation::new(fe(1, 1, 0), fe(2, 0, -1), fe(0, 1, 0), fe(-3, 1, 1));
        let t2 = Transformation::new(fe(0, 1, 0), fe(1, 0, 0), fe(1, 1, 1), fe(0, 0, 2));
        let e1 = e.apply(&t1);
        assert_eq!(e1.apply(&t1.inverse()), e);
        assert_eq!(e1.apply(&t2), e.apply(&t1.compose(&t2)));
        assert_eq!(e.apply(&Transformation::identity()), e);
        let u12 = t1.u.pow(12);
        assert_eq!(&e1.discriminant() * &u12, e.discriminant());
        assert_eq!(e1.j_invariant(), e.j_invariant());
        let w = e.is_isomorphic(&e1).unwrap();
        assert_eq!(e.apply(&w), e1);
    }

    #[test]
    fn twist_is_not_isomorphic() {
        let e = ex412();
        let i = e.invariants();
        let d = FieldElement::from_int(-1);
        let f27 = FieldElement::from_int(-27);
        let f54 = FieldElement::from_int(-54);
        let tw = Curve::new(
            FieldElement::zero(),
            FieldElement::zero(),
            FieldElement::zero(),
            &(&f27 * &i.c4) * &(&d * &d),
            &(&f54 * &i.c6) * &(&(&d * &d) * &d),
        );
        assert_eq!(tw.j_invariant(), e.j_invariant());
        assert!(e.is_isomorphic(&tw).is_none());
    }

    #[test]
    fn parse_round_trip() {
        let e: Curve = "[a^2+1, -a^2+a-1, 0, 1, 0]".parse().unwrap();
        assert_eq!(e, ex412());
        assert_eq!(e.to_string().parse::<Curve>().unwrap(), e);
        assert!("[1,2,3]".parse::<Curve>().is_err());
    }
}
