//! Division polynomials and F-rational torsion.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use num_integer::Integer;

use crate::arith::factor_u64;
use crate::curve::Curve;
use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::ideal::primes_up_to_norm;
use crate::point::Point;
use crate::polyf::{roots_in_f, PolyOverF};
use crate::residue::count_points;
use crate::tate::conductor_and_minimal_model;

/// Z/m × Z/n with n | m.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorsionStructure {
    pub m: u64,
    pub n: u64,
    pub generators: Vec<Point>,
}

impl TorsionStructure {
    pub fn order(&self) -> u64 {
        self.m * self.n
    }

    pub fn trivial() -> Self {
        TorsionStructure { m: 1, n: 1, generators: Vec::new() }
    }

    /// "0", "Z5" or "Z2 x Z4".
    pub fn label(&self) -> String {
        label(self.m, self.n)
    }
}

pub fn label(m: u64, n: u64) -> String {
    match (m, n) {
        (1, _) => "0".to_string(),
        (m, 1) => format!("Z{m}"),
        (m, n) => format!("Z{n} x Z{m}"),
    }
}

/// Parse a torsion label back to (m, n).
pub fn parse_label(s: &str) -> Result<(u64, u64)> {
    let s = s.trim();
    if s == "0" {
        return Ok((1, 1));
    }
    let parts: Vec<u64> = s
        .split('x')
        .map(|t| t.trim().trim_start_matches('Z').parse::<u64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::parse(s.to_string(), "bad torsion label"))?;
    match parts.as_slice() {
        [m] => Ok((*m, 1)),
        [n, m] if m % n == 0 => Ok((*m, *n)),
        _ => Err(Error::parse(s.to_string(), "bad torsion label")),
    }
}

impl fmt::Display for TorsionStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// The polynomials f_n with ψ_n = f_n (n odd) and ψ_n = ψ₂·f_n (n even).
pub struct DivisionPolys<'a> {
    e: &'a Curve,
    two: PolyOverF,
    memo: HashMap<u64, PolyOverF>,
}

impl<'a> DivisionPolys<'a> {
    pub fn new(e: &'a Curve) -> Self {
        let i = e.invariants();
        let f = |n: i64| FieldElement::from_int(n);
        let two = PolyOverF::new(vec![i.b6.clone(), &f(2) * &i.b4, i.b2.clone(), f(4)]);
        let mut memo = HashMap::new();
        memo.insert(0, PolyOverF::zero());
        memo.insert(1, PolyOverF::one());
        memo.insert(2, PolyOverF::one());
        memo.insert(3, PolyOverF::new(vec![i.b8.clone(), &f(3) * &i.b6, &f(3) * &i.b4, i.b2.clone(), f(3)]));
        memo.insert(
            4,
            PolyOverF::new(vec![
                &(&i.b4 * &i.b8) - &(&i.b6 * &i.b6),
                &(&i.b2 * &i.b8) - &(&i.b4 * &i.b6),
                &f(10) * &i.b8,
                &f(10) * &i.b6,
                &f(5) * &i.b4,
                i.b2.clone(),
                f(2),
            ]),
        );
        DivisionPolys { e, two, memo }
    }

    /// 4x³ + b2x² + 2b4x + b6 = ψ₂².
    pub fn psi2_squared(&self) -> &PolyOverF {
        &self.two
    }

    pub fn f(&mut self, n: u64) -> PolyOverF {
        if let Some(p) = self.memo.get(&n) {
            return p.clone();
        }
        let k = n / 2;
        let r = if n % 2 == 1 {
            let (a, b, cc, d) = (self.f(k + 2), self.f(k), self.f(k - 1), self.f(k + 1));
            let b3 = &(&b * &b) * &b;
            let d3 = &(&d * &d) * &d;
            let ff = &self.two * &self.two;
            if k.is_multiple_of(2) {
                &(&(&ff * &a) * &b3) - &(&cc * &d3)
            } else {
                &(&a * &b3) - &(&(&ff * &cc) * &d3)
            }
        } else {
            let (a, b, cc, d, g) = (self.f(k + 2), self.f(k - 1), self.f(k - 2), self.f(k + 1), self.f(k));
            &g * &(&(&a * &(&b * &b)) - &(&cc * &(&d * &d)))
        };
        self.memo.insert(n, r.clone());
        r
    }

    /// ψ_n² as a polynomial in x.
    pub fn psi_squared(&mut self, n: u64) -> PolyOverF {
        let f = self.f(n);
        let s = &f * &f;
        if n.is_multiple_of(2) {
            &s * &self.two
        } else {
            s
        }
    }

    /// ψ_{n−1}ψ_{n+1} as a polynomial in x.
    pub fn psi_prev_next(&mut self, n: u64) -> PolyOverF {
        let p = &self.f(n - 1) * &self.f(n + 1);
        if n % 2 == 1 {
            &p * &self.two
        } else {
            p
        }
    }

    pub fn curve(&self) -> &Curve {
        self.e
    }
}

/// ψ_m for odd m and ψ_m·ψ₂ for even m; a polynomial in x whose roots are the
/// x-coordinates of the nonzero m-torsion.
pub fn division_polynomial(e: &Curve, m: u64) -> PolyOverF {
    let mut d = DivisionPolys::new(e);
    let f = d.f(m);
    if m.is_multiple_of(2) {
        &f * d.psi2_squared()
    } else {
        f
    }
}

/// Points with the given x-coordinate.
pub fn points_with_x(e: &Curve, x: &FieldElement) -> Vec<Point> {
    let lin = &(&e.a1 * x) + &e.a3;
    let rhs = &(&(&(&(x + &e.a2) * x) + &e.a4) * x) + &e.a6;
    let disc = &(&lin * &lin) + &(&FieldElement::from_int(4) * &rhs);
    let Some(s) = disc.sqrt() else {
        return Vec::new();
    };
    let half = FieldElement::from_int(2).inv();
    let y1 = &(&s - &lin) * &half;
    let y2 = &(&(-&s) - &lin) * &half;
    let mut v = vec![Point::new(x.clone(), y1.clone())];
    if y2 != y1 {
        v.push(Point::new(x.clone(), y2));
    }
    v
}

/// All Q with ℓQ = P.
pub fn divide_point(d: &mut DivisionPolys, l: u64, p: &Point) -> Vec<Point> {
    let e = d.curve().clone();
    let ps = d.psi_squared(l);
    let pn = d.psi_prev_next(l);
    let poly = match p {
        Point::Infinity => ps.clone(),
        Point::Affine(x, _) => &(&(&PolyOverF::x() * &ps) - &pn) - &ps.scale(x),
    };
    let mut xs = roots_in_f(&poly);
    xs.dedup();
    let mut out = Vec::new();
    for x in xs {
        for q in points_with_x(&e, &x) {
            if &e.mul_point(l as i64, &q) == p {
                out.push(q);
            }
        }
    }
    if p.is_infinity() {
        out.push(Point::Infinity);
    }
    out
}

/// gcd of #E(O_F/P) over good primes of odd residue characteristic.
fn count_gcd(e: &Curve, norm_bound: u64, max_primes: usize) -> (u64, usize) {
    let mut g = 0u64;
    let mut used = 0;
    for pr in primes_up_to_norm(norm_bound) {
        if pr.p == 2 {
            continue;
        }
        if let Ok(r) = count_points(e, &pr) {
            g = g.gcd(&r.point_count);
            used += 1;
            if used == max_primes {
                break;
            }
        }
    }
    (g, used)
}

/// Primes ℓ dividing Norm(P) + 1 − a_P at every good odd prime of norm ≤ bound.
pub fn torsion_prime_candidates(e: &Curve, norm_bound: u64) -> Result<BTreeSet<u64>> {
    let m = conductor_and_minimal_model(e)?.minimal;
    let (g, used) = count_gcd(&m, norm_bound, usize::MAX);
    if used < 3 {
        return Err(Error::InsufficientPrimes);
    }
    Ok(factor_u64(g).into_iter().map(|(l, _)| l).collect())
}

fn subgroup_from(e: &Curve, gens: &[Point]) -> HashSet<Point> {
    let mut g: HashSet<Point> = HashSet::from([Point::Infinity]);
    for p in gens {
        let mut mult = Vec::new();
        let mut q = Point::Infinity;
        loop {
            mult.push(q.clone());
            q = e.add_points(&q, p);
            if q.is_infinity() {
                break;
            }
        }
        let mut next = HashSet::new();
        for a in &g {
            for b in &mult {
                next.insert(e.add_points(a, b));
            }
        }
        g = next;
    }
    g
}

/// The ℓ-primary part of E(F)_tors, at most `cap` points.
fn primary_part(e: &Curve, d: &mut DivisionPolys, l: u64, cap: u64) -> HashSet<Point> {
    let mut group: HashSet<Point> = divide_point(d, l, &Point::Infinity).into_iter().collect();
    loop {
        if group.len() as u64 >= cap {
            return group;
        }
        let mut grew = false;
        let mut pts: Vec<Point> = group.iter().cloned().collect();
        pts.sort();
        for p in pts.iter().filter(|p| !p.is_infinity()) {
            for q in divide_point(d, l, p) {
                if !group.contains(&q) {
                    group = subgroup_from(e, &[group.iter().cloned().collect::<Vec<_>>(), vec![q]].concat());
                    grew = true;
                    break;
                }
            }
            if grew {
                break;
            }
        }
        if !grew {
            return group;
        }
    }
}

fn order_in(e: &Curve, p: &Point) -> u64 {
    e.point_order(p, 1000).expect("torsion point")
}

/// Invariants (ℓ^a, ℓ^b) of an ℓ-group and generators.
fn structure_of(e: &Curve, g: &HashSet<Point>) -> (u64, u64, Point, Point) {
    let mut pts: Vec<Point> = g.iter().cloned().collect();
    pts.sort();
    let size = pts.len() as u64;
    let p1 = pts.iter().max_by_key(|p| (order_in(e, p), std::cmp::Reverse((*p).clone()))).unwrap().clone();
    let m = order_in(e, &p1);
    let n = size / m;
    if n == 1 {
        return (m, 1, p1, Point::Infinity);
    }
    let cyc = subgroup_from(e, std::slice::from_ref(&p1));
    for q in &pts {
        if order_in(e, q) == n && !cyc.contains(q) {
            let span = subgroup_from(e, &[p1.clone(), q.clone()]);
            if span.len() as u64 == size {
                return (m, n, p1, q.clone());
            }
        }
    }
    unreachable!("abelian ℓ-group of rank ≤ 2")
}

/// Exact torsion subgroup E(F)_tors.
pub fn torsion_subgroup(e: &Curve) -> Result<TorsionStructure> {
    let model = conductor_and_minimal_model(e)?;
    let m = &model.minimal;
    let mut bound = 200;
    let (mut b, mut used) = count_gcd(m, bound, 10);
    while used < 10 && bound < 5000 {
        bound *= 2;
        (b, used) = count_gcd(m, bound, 10);
    }
    let mut d = DivisionPolys::new(m);
    let (mut mm, mut nn) = (1u64, 1u64);
    let (mut g1, mut g2) = (Point::Infinity, Point::Infinity);
    for (l, k) in factor_u64(b) {
        let cap = l.pow(k);
        let part = primary_part(m, &mut d, l, cap);
        if part.len() == 1 {
            continue;
        }
        let (a, bb, p1, p2) = structure_of(m, &part);
        mm *= a;
        nn *= bb;
        g1 = m.add_points(&g1, &p1);
        g2 = m.add_points(&g2, &p2);
    }
    // back to the input model
    let back = model.transformation.inverse();
    let map = |p: &Point| map_point(p, &back);
    let mut gens = Vec::new();
    if mm > 1 {
        gens.push(map(&g1));
    }
    if nn > 1 {
        gens.push(map(&g2));
    }
    Ok(TorsionStructure { m: mm, n: nn, generators: gens })
}

/// Image on E.apply(t) of a point on E.
pub fn map_point(p: &Point, t: &crate::curve::Transformation) -> Point {
    match p {
        Point::Infinity => Point::Infinity,
        Point::Affine(x, y) => {
            // x = u²x' + r, y = u³y' + su²x' + t
            let u2 = &t.u * &t.u;
            let xp = &(x - &t.r) / &u2;
            let yp = &(&(y - &(&(&t.s * &u2) * &xp)) - &t.t) / &(&u2 * &t.u);
            Point::Affine(xp, yp)
        }
    }
}

/// Whether #E(F)_tors divides every sampled point count (sanity check).
pub fn divides_counts(e: &Curve, t: &TorsionStructure, norm_bound: u64) -> bool {
    let (g, _) = count_gcd(e, norm_bound, usize::MAX);
    g % t.order() == 0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_division_polynomials() {
        let e = Curve::from_ints([1, -1, 1, -3, 3]);
        assert_eq!(division_polynomial(&e, 1), PolyOverF::one());
        let i = e.invariants();
        let p2 = division_polynomial(&e, 2);
        assert_eq!(p2.coeffs(), &[i.b6.clone(), &FieldElement::from_int(2) * &i.b4, i.b2.clone(), 4.into()]);
        assert_eq!(division_polynomial(&e, 3).deg(), 4);
        assert_eq!(division_polynomial(&e, 5).deg(), 12);
        assert_eq!(division_polynomial(&e, 4).deg(), 9);
    }

    #[test]
    fn psi3_root_on_x3_plus_1() {
        let e = Curve::from_ints([0, 0, 0, 0, 1]);
        let r = roots_in_f(&division_polynomial(&e, 3));
        assert!(r.contains(&FieldElement::zero()));
        let p = Point::new(FieldElement::zero(), FieldElement::one());
        assert_eq!(e.point_order(&p, 10), Some(3));
    }

    #[test]
    fn recursion_matches_group_law() {
        // x(nP) = x − ψ_{n−1}ψ_{n+1}/ψ_n² at a point of infinite order
        let e = Curve::from_ints([0, 0, 1, -1, 0]);
        let p = Point::new(FieldElement::zero(), FieldElement::zero());
        let mut d = DivisionPolys::new(&e);
        for n in 2..8u64 {
            let np = e.mul_point(n as i64, &p);
            let x = FieldElement::zero();
            let want = &x - &(&d.psi_prev_next(n).eval(&x) / &d.psi_squared(n).eval(&x));
            assert_eq!(np.x(), Some(&want), "n = {n}");
        }
    }

    #[test]
    fn labels_round_trip() {
        for (m, n) in [(1, 1), (5, 1), (4, 2), (12, 2)] {
            assert_eq!(parse_label(&label(m, n)).unwrap(), (m, n));
        }
        assert_eq!(label(4, 2), "Z2 x Z4");
    }
}
