//! Tate's algorithm, conductors and global minimal models.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;

use crate::curve::{Curve, Transformation};
use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::ideal::{factor_element, IdealHNF, PrimeIdeal};
use crate::residue::{reduce_with, Elem, ResidueField};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kodaira {
    I(u32),
    II,
    III,
    IV,
    IStar(u32),
    IVStar,
    IIIStar,
    IIStar,
}

impl fmt::Display for Kodaira {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kodaira::I(m) => write!(f, "I{m}"),
            Kodaira::II => f.write_str("II"),
            Kodaira::III => f.write_str("III"),
            Kodaira::IV => f.write_str("IV"),
            Kodaira::IStar(m) => write!(f, "I{m}*"),
            Kodaira::IVStar => f.write_str("IV*"),
            Kodaira::IIIStar => f.write_str("III*"),
            Kodaira::IIStar => f.write_str("II*"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ReductionKind {
    Good,
    Multiplicative { split: bool },
    Additive,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalData {
    pub prime: PrimeIdeal,
    /// Integral model, minimal at the prime.
    pub model: Curve,
    /// From the input model to `model`.
    pub transformation: Transformation,
    pub v_disc: i64,
    pub conductor_exponent: u32,
    pub kodaira: Kodaira,
    pub kind: ReductionKind,
}

struct Local<'a> {
    pr: &'a PrimeIdeal,
    k: std::sync::Arc<ResidueField>,
}

impl Local<'_> {
    fn val(&self, x: &FieldElement) -> i64 {
        self.pr.valuation(x).unwrap_or(i64::MAX / 4)
    }

    fn red(&self, x: &FieldElement) -> Elem {
        reduce_with(&self.k, x, self.pr).expect("P-integral")
    }

    fn lift(&self, x: Elem) -> FieldElement {
        let c = self.k.to_poly(x);
        let mut v = [0i64; 3];
        for (i, ci) in c.iter().enumerate() {
            v[i] = *ci as i64;
        }
        FieldElement::from_ints(v[0], v[1], v[2])
    }

    fn divides(&self, x: &FieldElement) -> bool {
        self.red(x) == 0
    }

    fn pi_pow(&self, n: u32) -> FieldElement {
        self.pr.generator.pow(n as i64)
    }

    fn over(&self, x: &FieldElement, n: u32) -> Elem {
        self.red(&(x / &self.pi_pow(n)))
    }

    fn sqrt(&self, x: Elem) -> Elem {
        if self.k.p == 2 {
            self.k.pth_root(x)
        } else {
            self.k.sqrt(x).expect("square in residue field")
        }
    }

    fn split_multiplicative(&self, c: &Curve) -> bool {
        let k = &self.k;
        if k.p == 2 {
            // T² + a1T + a2 with a1 ≠ 0 splits iff Tr(a2/a1²) = 0
            let a1 = self.red(&c.a1);
            let z = k.div(self.red(&c.a2), k.mul(a1, a1)).unwrap();
            let mut tr = 0;
            let mut y = z;
            for _ in 0..k.f {
                tr = k.add(tr, y);
                y = k.mul(y, y);
            }
            tr == 0
        } else {
            let b2 = self.red(&c.invariants().b2);
            k.chi(b2) == 1
        }
    }
}

fn rst(c: &Curve, r: FieldElement, s: FieldElement, t: FieldElement) -> (Curve, Transformation) {
    let tr = Transformation::shift(r, s, t);
    (c.apply(&tr), tr)
}

/// Tate's algorithm at one prime.
pub fn tate_local(e: &Curve, pr: &PrimeIdeal) -> Result<LocalData> {
    if e.is_singular() {
        return Err(Error::SingularCurve);
    }
    let l = Local { pr, k: ResidueField::for_prime(pr) };
    let k = l.k.clone();
    let p = pr.p;
    let pi = pr.generator.clone();
    let mut total = Transformation::identity();
    let mut c = e.clone();
    let apply = |c: &mut Curve, total: &mut Transformation, tr: Transformation| {
        *c = c.apply(&tr);
        *total = total.compose(&tr);
    };

    // make the model P-integral
    let mut neg = 0i64;
    for (i, x) in c.ainvs().iter().enumerate() {
        if !x.is_zero() {
            let w = [1, 2, 3, 4, 6][i];
            let v = l.val(x);
            if v < 0 {
                neg = neg.max((-v + w - 1) / w);
            }
        }
    }
    if neg > 0 {
        apply(&mut c, &mut total, Transformation::scaling(pi.pow(-neg)));
    }

    let half = k.inv(k.from_int(2));
    loop {
        let inv = c.invariants();
        let vd = l.val(&inv.disc);
        let done = |c: Curve, total: Transformation, kod: Kodaira, f: u32, kind: ReductionKind| {
            Ok(LocalData {
                prime: pr.clone(),
                model: c,
                transformation: total,
                v_disc: vd,
                conductor_exponent: f,
                kodaira: kod,
                kind,
            })
        };
        if vd == 0 {
            return done(c, total, Kodaira::I(0), 0, ReductionKind::Good);
        }
        // move the singular point to (0, 0)
        let (r, t) = if p == 2 {
            if l.divides(&inv.b2) {
                let r = l.sqrt(l.red(&c.a4));
                let rr = l.lift(r);
                let v = &(&(&(&(&rr + &c.a2) * &rr) + &c.a4) * &rr) + &c.a6;
                (r, l.sqrt(l.red(&v)))
            } else {
                let a1i = k.inv(l.red(&c.a1)).unwrap();
                let r = k.mul(a1i, l.red(&c.a3));
                let t = k.mul(a1i, k.add(l.red(&c.a4), k.mul(r, r)));
                (r, t)
            }
        } else if p == 3 {
            let r = if l.divides(&inv.b2) {
                k.pth_root(k.neg(l.red(&inv.b6)))
            } else {
                k.neg(k.div(l.red(&inv.b4), l.red(&inv.b2)).unwrap())
            };
            (r, k.add(k.mul(l.red(&c.a1), r), l.red(&c.a3)))
        } else {
            let twelve = k.from_int(12);
            let r = if l.divides(&inv.c4) {
                k.neg(k.div(l.red(&inv.b2), twelve).unwrap())
            } else {
                let num = k.add(l.red(&inv.c6), k.mul(l.red(&inv.b2), l.red(&inv.c4)));
                k.neg(k.div(num, k.mul(twelve, l.red(&inv.c4))).unwrap())
            };
            let t = k.neg(k.mul(k.add(k.mul(l.red(&c.a1), r), l.red(&c.a3)), half.unwrap()));
            (r, t)
        };
        let (c2, tr) = rst(&c, l.lift(r), FieldElement::zero(), l.lift(t));
        c = c2;
        total = total.compose(&tr);
        let inv = c.invariants();

        if !l.divides(&inv.b2) {
            let split = l.split_multiplicative(&c);
            return done(c, total, Kodaira::I(vd as u32), 1, ReductionKind::Multiplicative { split });
        }
        let add = ReductionKind::Additive;
        if l.val(&c.a6) < 2 {
            return done(c, total, Kodaira::II, vd as u32, add);
        }
        if l.val(&inv.b8) < 3 {
            return done(c, total, Kodaira::III, (vd - 1) as u32, add);
        }
        if l.val(&inv.b6) < 3 {
            return done(c, total, Kodaira::IV, (vd - 2) as u32, add);
        }

        // now P | a1, a2; P² | a3, a4; P³ | a6
        let (s, t) = if p == 2 {
            let s = l.sqrt(l.red(&c.a2));
            let t = l.sqrt(l.over(&c.a6, 2));
            (l.lift(s), &pi * &l.lift(t))
        } else if p == 3 {
            (c.a1.clone(), c.a3.clone())
        } else {
            // exact products with a lift of 1/2, so that P² | a3 also when P is ramified
            let h = -&l.lift(half.unwrap());
            (&c.a1 * &h, &c.a3 * &h)
        };
        let (c2, tr) = rst(&c, FieldElement::zero(), s, t);
        c = c2;
        total = total.compose(&tr);

        let b = l.over(&c.a2, 1);
        let cc = l.over(&c.a4, 2);
        let d = l.over(&c.a6, 3);
        let m = |x, y| k.mul(x, y);
        let n = |x: i64| k.from_int(x);
        // discriminant of X³ + bX² + cX + d
        let w = k.add(
            k.sub(
                k.add(k.sub(m(n(27), m(d, d)), m(m(b, b), m(cc, cc))), m(n(4), m(m(b, b), m(b, d)))),
                m(n(18), m(m(b, cc), d)),
            ),
            m(n(4), m(m(cc, cc), cc)),
        );
        let x = k.sub(m(n(3), cc), m(b, b));
        if w != 0 {
            return done(c, total, Kodaira::IStar(0), (vd - 4) as u32, add);
        }
        if x != 0 {
            // double root
            let rho = if p == 2 {
                l.sqrt(cc)
            } else if p == 3 {
                k.div(cc, b).unwrap()
            } else {
                k.div(k.sub(m(b, cc), m(n(9), d)), m(n(2), x)).unwrap()
            };
            let (c2, tr) = rst(&c, &pi * &l.lift(rho), FieldElement::zero(), FieldElement::zero());
            c = c2;
            total = total.compose(&tr);
            let (mut ix, mut iy) = (3u32, 3u32);
            let mut mx = l.pi_pow(2);
            let mut my = mx.clone();
            loop {
                let a3t = l.red(&(&c.a3 / &my));
                let a6t = l.red(&(&c.a6 / &(&mx * &my)));
                if k.add(m(a3t, a3t), m(n(4), a6t)) != 0 {
                    break;
                }
                let root = if p == 2 { l.sqrt(a6t) } else { k.neg(m(a3t, half.unwrap())) };
                let (c2, tr) = rst(&c, FieldElement::zero(), FieldElement::zero(), &my * &l.lift(root));
                c = c2;
                total = total.compose(&tr);
                my = &my * &pi;
                iy += 1;
                let a2t = l.red(&(&c.a2 / &pi));
                let a4t = l.red(&(&c.a4 / &(&pi * &mx)));
                let a6t = l.red(&(&c.a6 / &(&mx * &my)));
                if k.sub(m(a4t, a4t), m(n(4), m(a2t, a6t))) != 0 {
                    break;
                }
                let root = if p == 2 {
                    l.sqrt(k.div(a6t, a2t).unwrap())
                } else {
                    k.neg(k.div(a4t, m(n(2), a2t)).unwrap())
                };
                let (c2, tr) = rst(&c, &mx * &l.lift(root), FieldElement::zero(), FieldElement::zero());
                c = c2;
                total = total.compose(&tr);
                mx = &mx * &pi;
                ix += 1;
            }
            let mm = ix + iy - 5;
            return done(c, total, Kodaira::IStar(mm), (vd - 4 - mm as i64) as u32, add);
        }
        // triple root
        let rho = if p == 2 {
            b
        } else if p == 3 {
            k.pth_root(k.neg(d))
        } else {
            k.neg(k.div(b, n(3)).unwrap())
        };
        let (c2, tr) = rst(&c, &pi * &l.lift(rho), FieldElement::zero(), FieldElement::zero());
        c = c2;
        total = total.compose(&tr);
        let x3 = l.over(&c.a3, 2);
        let x6 = l.over(&c.a6, 4);
        if k.add(m(x3, x3), m(n(4), x6)) != 0 {
            return done(c, total, Kodaira::IVStar, (vd - 6) as u32, add);
        }
        let root = if p == 2 { l.sqrt(x6) } else { k.neg(m(x3, half.unwrap())) };
        let (c2, tr) = rst(&c, FieldElement::zero(), FieldElement::zero(), &l.pi_pow(2) * &l.lift(root));
        c = c2;
        total = total.compose(&tr);
        if l.val(&c.a4) < 4 {
            return done(c, total, Kodaira::IIIStar, (vd - 7) as u32, add);
        }
        if l.val(&c.a6) < 6 {
            return done(c, total, Kodaira::IIStar, (vd - 8) as u32, add);
        }
        // not minimal
        apply(&mut c, &mut total, Transformation::scaling(pi.clone()));
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlobalData {
    pub conductor: IdealHNF,
    /// Canonical global minimal model.
    pub minimal: Curve,
    /// From the input model to `minimal`.
    pub transformation: Transformation,
    pub locals: Vec<LocalData>,
}

impl GlobalData {
    pub fn conductor_norm(&self) -> BigInt {
        self.conductor.norm()
    }

    pub fn bad_primes(&self) -> Vec<&PrimeIdeal> {
        self.locals.iter().filter(|l| l.conductor_exponent > 0).map(|l| &l.prime).collect()
    }
}

/// Conductor, local data at every prime dividing the discriminant, and the
/// canonical global minimal model.
pub fn conductor_and_minimal_model(e: &Curve) -> Result<GlobalData> {
    if e.is_singular() {
        return Err(Error::SingularCurve);
    }
    let (mut c, mut total) = e.integral_model();
    let primes: Vec<PrimeIdeal> = factor_element(&c.discriminant()).into_iter().map(|(p, _)| p).collect();
    let mut locals = Vec::with_capacity(primes.len());
    let mut conductor = IdealHNF::unit();
    for pr in primes {
        let ld = tate_local(&c, &pr)?;
        c = ld.model.clone();
        total = total.compose(&ld.transformation);
        if ld.conductor_exponent > 0 {
            conductor = conductor.mul(&pr.ideal.pow(ld.conductor_exponent));
        }
        locals.push(ld);
    }
    let (m, t) = canonical_model(&c);
    total = total.compose(&t);
    Ok(GlobalData { conductor, minimal: m, transformation: total, locals })
}

pub fn conductor(e: &Curve) -> Result<IdealHNF> {
    Ok(conductor_and_minimal_model(e)?.conductor)
}

fn size_key(c: &Curve) -> f64 {
    c.ainvs()
        .iter()
        .zip([1.0, 2.0, 3.0, 4.0, 6.0])
        .map(|(x, w)| x.t2().powf(1.0 / w))
        .sum()
}

fn round_div(x: &BigRational, d: i64) -> BigInt {
    let q = x / BigRational::from_integer(BigInt::from(d));
    (q + BigRational::new(BigInt::from(1), BigInt::from(2))).floor().to_integer()
}

/// Reduce a1, a3 coordinates into {0, 1} and a2 coordinates into {−1, 0, 1}
/// by an integral (r, s, t) shift.
pub fn reduce_shift(c: &Curve) -> (Curve, Transformation) {
    let s = FieldElement::from_bigints(c.a1.coords().clone().map(|x| -(x.to_integer().div_floor(&BigInt::from(2)))));
    let b = &(&c.a2 - &(&s * &c.a1)) - &(&s * &s);
    let r = FieldElement::from_bigints(b.coords().clone().map(|x| -round_div(&x, 3)));
    let a3 = &c.a3 + &(&r * &c.a1);
    let t = FieldElement::from_bigints(a3.coords().clone().map(|x| -(x.to_integer().div_floor(&BigInt::from(2)))));
    let tr = Transformation::shift(r, s, t);
    (c.apply(&tr), tr)
}

/// Canonical representative of the isomorphism class of an integral minimal
/// model under integral shifts and unit scalings.
pub fn canonical_model(c: &Curve) -> (Curve, Transformation) {
    let a = FieldElement::a();
    let ai = a.inv();
    let (mut cur, mut total) = reduce_shift(c);
    let mut sz = size_key(&cur);
    // descend in k first
    for _ in 0..1000 {
        let mut best: Option<(f64, Curve, Transformation)> = None;
        for u in [&a, &ai] {
            let (d, t) = reduce_shift(&cur.apply(&Transformation::scaling(u.clone())));
            let s = size_key(&d);
            if s < sz * (1.0 - 1e-12) && best.as_ref().is_none_or(|b| s < b.0) {
                best = Some((s, d, Transformation::scaling(u.clone()).compose(&t)));
            }
        }
        match best {
            Some((s, d, t)) => {
                sz = s;
                cur = d;
                total = total.compose(&t);
            }
            None => break,
        }
    }
    let mut cands: Vec<(f64, Curve, Transformation)> = Vec::new();
    for kk in -6i64..=6 {
        for sign in [1i64, -1] {
            let u = a.pow(kk).scale_int(sign);
            let tu = Transformation::scaling(u);
            let (d, t) = reduce_shift(&cur.apply(&tu));
            cands.push((size_key(&d), d, tu.compose(&t)));
        }
    }
    let smin = cands.iter().map(|c| c.0).fold(f64::INFINITY, f64::min);
    let (_, best, t) = cands
        .into_iter()
        .filter(|c| c.0 <= smin * (1.0 + 1e-9))
        .min_by(|x, y| x.1.cmp(&y.1))
        .unwrap();
    (best, total.compose(&t))
}

/// v_P of the minimal discriminant at each bad prime, for display.
pub fn kodaira_summary(g: &GlobalData) -> Vec<(String, i64, u32, Kodaira)> {
    g.locals
        .iter()
        .filter(|l| l.v_disc > 0)
        .map(|l| (l.prime.to_string(), l.v_disc, l.conductor_exponent, l.kodaira))
        .collect()
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
    fn example_conductor_385() {
        let g = conductor_and_minimal_model(&ex412()).unwrap();
        assert_eq!(g.conductor.norm(), BigInt::from(385));
        for l in &g.locals {
            assert_eq!(l.conductor_exponent, 1);
            assert!(matches!(l.kind, ReductionKind::Multiplicative { .. }));
        }
        assert!(g.minimal.is_isomorphic(&ex412()).is_some());
        assert_eq!(ex412().apply(&g.transformation), g.minimal);
    }

    #[test]
    fn good_prime_is_i0() {
        let p = factor_rational_prime(13)[0].clone();
        let l = tate_local(&ex412(), &p).unwrap();
        assert_eq!((l.kodaira, l.conductor_exponent), (Kodaira::I(0), 0));
    }

    #[test]
    fn additive_at_constructed_prime() {
        // y² = x³ + π²x is I0*, y² = x³ + πx is III, at a degree-one prime above 5
        let p = factor_rational_prime(5).iter().find(|p| p.f == 1).unwrap().clone();
        let z = FieldElement::zero;
        let e = Curve::new(z(), z(), z(), p.generator.pow(2), z());
        let l = tate_local(&e, &p).unwrap();
        assert_eq!(l.kind, ReductionKind::Additive);
        assert_eq!((l.kodaira, l.v_disc, l.conductor_exponent), (Kodaira::IStar(0), 6, 2));
        let e = Curve::new(z(), z(), z(), p.generator.clone(), z());
        let l = tate_local(&e, &p).unwrap();
        assert_eq!((l.kodaira, l.v_disc, l.conductor_exponent), (Kodaira::III, 3, 2));
    }

    #[test]
    fn non_minimal_model_is_minimalized() {
        let e = ex412();
        let u = fe(1, 2, 0);
        let big = e.apply(&Transformation::scaling(u.inv()));
        let g = conductor_and_minimal_model(&big).unwrap();
        assert_eq!(g.conductor.norm(), BigInt::from(385));
        assert_eq!(g.minimal, conductor_and_minimal_model(&e).unwrap().minimal);
        let again = conductor_and_minimal_model(&g.minimal).unwrap();
        assert_eq!(again.minimal, g.minimal);
    }

    #[test]
    fn additive_in_small_characteristic_is_stable() {
        // twists by 2 and 3 create additive reduction above 2 and 3
        for d in [2i64, 3, -1] {
            let e = ex412();
            let i = e.invariants();
            let dd = FieldElement::from_int(d);
            let tw = Curve::new(
                FieldElement::zero(),
                FieldElement::zero(),
                FieldElement::zero(),
                &(&FieldElement::from_int(-27) * &i.c4) * &(&dd * &dd),
                &(&FieldElement::from_int(-54) * &i.c6) * &(&(&dd * &dd) * &dd),
            );
            let g = conductor_and_minimal_model(&tw).unwrap();
            let moved = tw.apply(&Transformation::new(fe(0, 1, 0), fe(1, 1, 0), fe(0, 0, 1), fe(2, 0, 1)));
            let g2 = conductor_and_minimal_model(&moved).unwrap();
            assert_eq!(g.conductor, g2.conductor);
            assert_eq!(g.minimal, g2.minimal);
            assert!(g.conductor.norm() > BigInt::from(385));
        }
    }
}
