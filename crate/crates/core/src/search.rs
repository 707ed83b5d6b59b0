//! Strategies for finding curves of a prescribed conductor.

use std::collections::BTreeSet;
use std::sync::OnceLock;
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{exact_root, next_prime, pow_mod};
use crate::curve::Curve;
use crate::error::{Error, Result};
use crate::field::{complex_root, FieldElement};
use crate::ideal::{factor_ideal, factor_rational_prime, principal_generator, primes_up_to_norm, IdealHNF, PrimeIdeal};
use crate::isogeny::isogeny_class;
use crate::poly::modp;
use crate::tate::{conductor_and_minimal_model, tate_local};
use crate::torsion::{parse_label, torsion_subgroup};

/// Coefficients range over {(c0 + c1·a + c2·a²)/d : |cᵢ| ≤ bound, d ∈ denominators}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchBox {
    pub bound: i64,
    pub denominators: Vec<i64>,
}

impl SearchBox {
    pub fn new(bound: i64) -> Self {
        SearchBox { bound, denominators: vec![1] }
    }

    pub fn with_denominators(bound: i64, denominators: Vec<i64>) -> Self {
        SearchBox { bound, denominators }
    }

    pub fn elements(&self) -> Vec<FieldElement> {
        let b = self.bound;
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for &d in &self.denominators {
            if d == 0 {
                continue;
            }
            let inv = BigRational::new(BigInt::one(), BigInt::from(d));
            for c2 in -b..=b {
                for c1 in -b..=b {
                    for c0 in -b..=b {
                        let x = FieldElement::from_ints(c0, c1, c2).scale(&inv);
                        if seen.insert(x.clone()) {
                            out.push(x);
                        }
                    }
                }
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Integral arithmetic on coordinate triples, for sieving.

type Tri = [i128; 3];

fn tmul(x: &Tri, y: &Tri) -> Tri {
    let z0 = x[0] * y[0];
    let z1 = x[0] * y[1] + x[1] * y[0];
    let z2 = x[0] * y[2] + x[1] * y[1] + x[2] * y[0];
    let z3 = x[1] * y[2] + x[2] * y[1];
    let z4 = x[2] * y[2];
    // a³ = a² − 1, a⁴ = a² − a − 1
    [z0 - z3 - z4, z1 - z4, z2 + z3 + z4]
}

fn tadd(x: &Tri, y: &Tri) -> Tri {
    [x[0] + y[0], x[1] + y[1], x[2] + y[2]]
}

fn tscale(k: i128, x: &Tri) -> Tri {
    [k * x[0], k * x[1], k * x[2]]
}

fn tnorm(x: &Tri) -> i128 {
    let c0 = *x;
    let c1 = tmul(x, &[0, 1, 0]);
    let c2 = tmul(x, &[0, 0, 1]);
    let m = [c0, c1, c2];
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn tri_disc(a: &[Tri; 5]) -> Tri {
    let [a1, a2, a3, a4, a6] = a;
    let b2 = tadd(&tmul(a1, a1), &tscale(4, a2));
    let b4 = tadd(&tmul(a1, a3), &tscale(2, a4));
    let b6 = tadd(&tmul(a3, a3), &tscale(4, a6));
    let b8 = {
        let t1 = tmul(&tmul(a1, a1), a6);
        let t2 = tscale(4, &tmul(a2, a6));
        let t3 = tmul(&tmul(a1, a3), a4);
        let t4 = tmul(&tmul(a2, a3), a3);
        let t5 = tmul(a4, a4);
        [t1[0] + t2[0] - t3[0] + t4[0] - t5[0], t1[1] + t2[1] - t3[1] + t4[1] - t5[1], t1[2] + t2[2] - t3[2] + t4[2] - t5[2]]
    };
    let t1 = tmul(&tmul(&b2, &b2), &b8);
    let t2 = tscale(8, &tmul(&tmul(&b4, &b4), &b4));
    let t3 = tscale(27, &tmul(&b6, &b6));
    let t4 = tscale(9, &tmul(&tmul(&b2, &b4), &b6));
    [-t1[0] - t2[0] - t3[0] + t4[0], -t1[1] - t2[1] - t3[1] + t4[1], -t1[2] - t2[2] - t3[2] + t4[2]]
}

/// Necessary condition for conductor support inside the primes of `norm_primes`:
/// away from them the discriminant norm must be a 12th power.
struct NormSieve {
    primes: Vec<BigInt>,
}

impl NormSieve {
    fn new(conductor: &IdealHNF) -> Self {
        let n = conductor.norm();
        let primes = crate::arith::prime_divisors(&n);
        NormSieve { primes }
    }

    fn strip(&self, mut x: BigInt) -> BigInt {
        x = x.abs();
        for p in &self.primes {
            while !x.is_zero() && x.is_multiple_of(p) {
                x /= p;
            }
        }
        x
    }

    fn passes_int(&self, n: &BigInt) -> bool {
        if n.is_zero() {
            return false;
        }
        let r = self.strip(n.clone());
        r.is_one() || exact_root(&r, 12).is_some()
    }

    fn passes(&self, n: &BigRational) -> bool {
        self.passes_int(n.numer()) && (n.denom().is_one() || self.passes_int(n.denom()))
    }
}

fn canonical_if_conductor(c: &Curve, target: &IdealHNF) -> Option<Curve> {
    if c.is_singular() {
        return None;
    }
    let g = conductor_and_minimal_model(c).ok()?;
    (g.conductor == *target).then_some(g.minimal)
}

fn dedup_isomorphic(curves: Vec<Curve>) -> Vec<Curve> {
    let mut out: Vec<Curve> = Vec::new();
    for c in curves {
        if !out.iter().any(|d| d == &c || d.is_isomorphic(&c).is_some()) {
            out.push(c);
        }
    }
    out.sort();
    out
}

/// Loop over Weierstrass equations with a1, a3 reduced mod 2 and a2 reduced
/// mod 3 (every curve has such a model) and a4, a6 in the box.
pub fn naive_search(conductor: &IdealHNF, bx: &SearchBox) -> Vec<Curve> {
    let sieve = NormSieve::new(conductor);
    let b = bx.bound;
    let tris = |lo: i64, hi: i64| -> Vec<Tri> {
        let (lo, hi) = (lo.max(-b) as i128, hi.min(b) as i128);
        let mut v = Vec::new();
        for c2 in lo..=hi {
            for c1 in lo..=hi {
                for c0 in lo..=hi {
                    v.push([c0, c1, c2]);
                }
            }
        }
        v
    };
    let odd = tris(0, 1);
    let mid = tris(-1, 1);
    let full = tris(-b, b);
    let mut hits = Vec::new();
    for a1 in &odd {
        for a3 in &odd {
            for a2 in &mid {
                for a4 in &full {
                    for a6 in &full {
                        let d = tri_disc(&[*a1, *a2, *a3, *a4, *a6]);
                        let n = tnorm(&d);
                        if n == 0 || !sieve.passes_int(&BigInt::from(n)) {
                            continue;
                        }
                        let fe = |t: &Tri| FieldElement::from_ints(t[0] as i64, t[1] as i64, t[2] as i64);
                        let c = Curve::new(fe(a1), fe(a2), fe(a3), fe(a4), fe(a6));
                        if let Some(m) = canonical_if_conductor(&c, conductor) {
                            hits.push(m);
                        }
                    }
                }
            }
        }
    }
    dedup_isomorphic(hits)
}

// ---------------------------------------------------------------------------
// Torsion families.

pub const FAMILIES: [&str; 11] = ["Z4", "Z5", "Z6", "Z7", "Z8", "Z9", "Z10", "Z12", "Z2 x Z4", "Z2 x Z6", "Z2 x Z8"];

/// Order of (0,0) on the family's curves.
pub fn family_point_order(family: &str) -> Result<u64> {
    let (m, _) = parse_label(family)?;
    if !FAMILIES.contains(&family) {
        return Err(Error::parse(family, "no Tate normal family"));
    }
    Ok(m)
}

fn family_bc(family: &str, t: &FieldElement) -> Result<(FieldElement, FieldElement)> {
    let f = FieldElement::from_int;
    let one = FieldElement::one();
    let div = |x: &FieldElement, y: &FieldElement| -> Result<FieldElement> {
        if y.is_zero() {
            Err(Error::SingularParameters)
        } else {
            Ok(x / y)
        }
    };
    let t2 = t * t;
    Ok(match family {
        "Z4" => (t.clone(), FieldElement::zero()),
        "Z5" => (t.clone(), t.clone()),
        "Z6" => (t + &t2, t.clone()),
        "Z7" => (&(&t2 * t) - &t2, &t2 - t),
        "Z8" => {
            let b = &(&(&f(2) * t) - &one) * &(t - &one);
            let c = div(&b, t)?;
            (b, c)
        }
        "Z9" => {
            let c = &t2 * &(t - &one);
            let b = &c * &(&(&t2 - t) + &one);
            (b, c)
        }
        "Z10" => {
            let q = &(&t2 - &(&f(3) * t)) + &one;
            let c = div(&-&(&(t * &(t - &one)) * &(&(&f(2) * t) - &one)), &q)?;
            let b = div(&-&(&c * &t2), &q)?;
            (b, c)
        }
        "Z12" => {
            let tm = t - &one;
            let q = &(&(&f(3) * &t2) - &(&f(3) * t)) + &one;
            let c = div(&-&(&(t * &(&(&f(2) * t) - &one)) * &q), &(&(&tm * &tm) * &tm))?;
            let r = &(&(&f(2) * &t2) - &(&f(2) * t)) + &one;
            let b = div(&-&(&c * &r), &tm)?;
            (b, c)
        }
        "Z2 x Z4" => (&t2 - &FieldElement::from_rational(BigRational::new(1.into(), 16.into())), FieldElement::zero()),
        "Z2 x Z6" => {
            let c = div(&(&f(10) - &(&f(2) * t)), &(&t2 - &f(9)))?;
            (&c + &(&c * &c), c)
        }
        "Z2 x Z8" => {
            let d = div(&(t * &(&(&f(8) * t) + &f(2))), &(&(&f(8) * &t2) - &one))?;
            let b = &(&(&f(2) * &d) - &one) * &(&d - &one);
            let c = div(&b, &d)?;
            (b, c)
        }
        _ => return Err(Error::parse(family, "no Tate normal family")),
    })
}

/// y² + (1−c)xy − by = x³ − bx² with (b, c) from the family's parametrization.
pub fn tate_normal_curve(family: &str, params: &[FieldElement]) -> Result<Curve> {
    let n = family_point_order(family)?;
    let t = params.first().ok_or(Error::SingularParameters)?;
    let (b, c) = family_bc(family, t)?;
    let e = Curve::new(&FieldElement::one() - &c, -&b, -&b, FieldElement::zero(), FieldElement::zero());
    if e.is_singular() {
        return Err(Error::SingularParameters);
    }
    let p = crate::point::Point::new(FieldElement::zero(), FieldElement::zero());
    if e.point_order(&p, n) != Some(n) {
        return Err(Error::SingularParameters);
    }
    Ok(e)
}

/// Family curves in the box whose conductor is the target, as minimal models.
pub fn torsion_family_search(conductor: &IdealHNF, family: &str, bx: &SearchBox) -> Result<Vec<Curve>> {
    let (fm, fn_) = parse_label(family)?;
    family_point_order(family)?;
    let sieve = NormSieve::new(conductor);
    let mut hits = Vec::new();
    for t in bx.elements() {
        let Ok((b, c)) = family_bc(family, &t) else { continue };
        let e = Curve::new(&FieldElement::one() - &c, -&b, -&b, FieldElement::zero(), FieldElement::zero());
        let d = e.discriminant();
        if d.is_zero() || !sieve.passes(&d.norm()) {
            continue;
        }
        let Some(m) = canonical_if_conductor(&e, conductor) else { continue };
        let tors = torsion_subgroup(&m)?;
        if tors.m % fm == 0 && tors.n % fn_ == 0 {
            hits.push(m);
        }
    }
    Ok(dedup_isomorphic(hits))
}

// ---------------------------------------------------------------------------
// Twists.

/// E^d: c4 ↦ d²c4, c6 ↦ d³c6, returned as a canonical minimal model.
pub fn quadratic_twist(e: &Curve, d: &FieldElement) -> Result<Curve> {
    if d.is_zero() {
        return Err(Error::ZeroTwist);
    }
    let i = e.invariants();
    let d2 = d * d;
    let t = Curve::new(
        FieldElement::zero(),
        FieldElement::zero(),
        FieldElement::zero(),
        &(&FieldElement::from_int(-27) * &i.c4) * &d2,
        &(&FieldElement::from_int(-54) * &i.c6) * &(&d2 * d),
    );
    Ok(conductor_and_minimal_model(&t)?.minimal)
}

fn unit_square_classes() -> [FieldElement; 4] {
    let a = FieldElement::a();
    [FieldElement::one(), FieldElement::from_int(-1), a.clone(), -&a]
}

/// Lower bound for Norm(cond(E^d)): the part of n at odd primes prime to d, times
/// N(p)² for each odd p | d not dividing n.
pub fn twist_conductor_lower_bound(n: &[(PrimeIdeal, u32)], d: &[PrimeIdeal]) -> BigInt {
    let mut l = BigInt::one();
    for (p, e) in n {
        if p.p != 2 && !d.contains(p) {
            l *= p.norm_big().pow(*e);
        }
    }
    for p in d {
        if p.p != 2 && !n.iter().any(|(q, _)| q == p) {
            l *= p.norm_big().pow(2);
        }
    }
    l
}

/// Squarefree d (up to squares of units) whose twist might have norm conductor
/// at most `norm_bound`.
pub fn twist_candidates(e: &Curve, norm_bound: u64) -> Result<Vec<FieldElement>> {
    let n = conductor_and_minimal_model(e)?.conductor;
    let nf = factor_ideal(&n);
    let bound = BigInt::from(norm_bound);
    // primes that may divide d
    let mut pool: Vec<PrimeIdeal> = nf.iter().map(|(p, _)| p.clone()).collect();
    for p in factor_rational_prime(2).iter() {
        if !pool.contains(p) {
            pool.push(p.clone());
        }
    }
    // a new odd prime contributes at least N(p)²
    let max_norm = bound.sqrt().to_u64().unwrap_or(u64::MAX);
    for p in primes_up_to_norm(max_norm.max(1)) {
        if !pool.contains(&p) {
            pool.push(p);
        }
    }
    pool.sort();
    let mut ideals: Vec<Vec<PrimeIdeal>> = Vec::new();
    fn rec(pool: &[PrimeIdeal], i: usize, cur: &mut Vec<PrimeIdeal>, nf: &[(PrimeIdeal, u32)], bound: &BigInt, out: &mut Vec<Vec<PrimeIdeal>>) {
        if i == pool.len() {
            if &twist_conductor_lower_bound(nf, cur) <= bound {
                out.push(cur.clone());
            }
            return;
        }
        rec(pool, i + 1, cur, nf, bound, out);
        cur.push(pool[i].clone());
        // prune: adding primes outside n only raises the bound
        let in_n = nf.iter().any(|(q, _)| q == &pool[i]);
        if in_n || pool[i].p == 2 || &twist_conductor_lower_bound(nf, cur) <= bound {
            rec(pool, i + 1, cur, nf, bound, out);
        }
        cur.pop();
    }
    rec(&pool, 0, &mut Vec::new(), &nf, &bound, &mut ideals);
    let mut out = BTreeSet::new();
    for ps in ideals {
        let mut g = FieldElement::one();
        for p in &ps {
            g = &g * &p.generator;
        }
        let g = if ps.is_empty() { g } else { principal_generator(&IdealHNF::principal(&g)?) };
        for u in unit_square_classes() {
            let d = &g * &u;
            if !d.is_one() {
                out.insert(d);
            }
        }
    }
    Ok(out.into_iter().collect())
}

// ---------------------------------------------------------------------------
// Selmer groups F(S, m).

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelmerBasis {
    pub s: Vec<PrimeIdeal>,
    pub m: u64,
    /// −1 (when nontrivial), a, then π_p for p ∈ S.
    pub generators: Vec<FieldElement>,
    pub orders: Vec<u64>,
    /// Index of the image F(S,m)_{mn} in F(S,m), when projected.
    pub index: u64,
}

impl SelmerBasis {
    pub fn order(&self) -> u64 {
        self.orders.iter().product()
    }

    /// Exponent vectors of every element.
    pub fn exponent_vectors(&self) -> Vec<Vec<u64>> {
        let mut out = vec![vec![]];
        for &o in &self.orders {
            let mut next = Vec::with_capacity(out.len() * o as usize);
            for v in &out {
                for e in 0..o {
                    let mut w = v.clone();
                    w.push(e);
                    next.push(w);
                }
            }
            out = next;
        }
        out
    }

    pub fn element(&self, exps: &[u64]) -> FieldElement {
        let mut x = FieldElement::one();
        for (g, &e) in self.generators.iter().zip(exps) {
            x = &x * &g.pow(e as i64);
        }
        x
    }

    pub fn elements(&self) -> Vec<FieldElement> {
        self.exponent_vectors().iter().map(|v| self.element(v)).collect()
    }

    /// ord_p(x) ≡ 0 mod m for every p outside S.
    pub fn contains(&self, x: &FieldElement) -> bool {
        if x.is_zero() {
            return false;
        }
        crate::ideal::factor_element(x)
            .iter()
            .all(|(p, e)| self.s.contains(p) || e.rem_euclid(self.m as i64) == 0)
    }
}

fn selmer_orders(s: &[PrimeIdeal], m: u64) -> (Vec<FieldElement>, Vec<u64>) {
    let mut gens = Vec::new();
    let mut orders = Vec::new();
    if m.is_multiple_of(2) {
        gens.push(FieldElement::from_int(-1));
        orders.push(2);
    }
    gens.push(FieldElement::a());
    orders.push(m);
    for p in s {
        gens.push(p.generator.clone());
        orders.push(m);
    }
    (gens, orders)
}

/// F(S,m) from the unit group ⟨−1, a⟩ and the canonical prime generators; with
/// `project_from = Some(mn)` the image of F(S,mn) → F(S,m).
pub fn selmer_group(s: &[PrimeIdeal], m: u64, project_from: Option<u64>) -> Result<SelmerBasis> {
    if ![2, 3, 4, 6, 12].contains(&m) {
        return Err(Error::parse(m.to_string(), "m must be 2, 3, 4, 6 or 12"));
    }
    let mut s: Vec<PrimeIdeal> = s.to_vec();
    s.sort();
    s.dedup();
    let (gens, orders) = selmer_orders(&s, m);
    let mut index = 1;
    if let Some(mn) = project_from {
        if mn % m != 0 {
            return Err(Error::parse(mn.to_string(), "projection source must be a multiple of m"));
        }
        // images of the F(S,mn) generators in exponent coordinates mod m
        let (big_gens, _) = selmer_orders(&s, mn);
        let mut images: Vec<Vec<u64>> = Vec::new();
        for g in &big_gens {
            let v: Vec<u64> = gens.iter().map(|h| u64::from(h == g)).collect();
            images.push(v);
        }
        let full: u64 = orders.iter().product();
        let span = subgroup_size(&images, &orders);
        index = full / span;
    }
    Ok(SelmerBasis { s, m, generators: gens, orders, index })
}

fn subgroup_size(gens: &[Vec<u64>], orders: &[u64]) -> u64 {
    let mut seen: BTreeSet<Vec<u64>> = BTreeSet::new();
    let zero = vec![0; orders.len()];
    seen.insert(zero.clone());
    let mut frontier = vec![zero];
    while let Some(v) = frontier.pop() {
        for g in gens {
            let w: Vec<u64> = v.iter().zip(g).zip(orders).map(|((a, b), o)| (a + b) % o).collect();
            if seen.insert(w.clone()) {
                frontier.push(w);
            }
        }
    }
    seen.len() as u64
}

// ---------------------------------------------------------------------------
// Points on E_w: Y² = X³ − 1728w.

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EwCandidate {
    pub w: FieldElement,
    pub curve: Curve,
    pub points: Vec<(FieldElement, FieldElement)>,
}

impl EwCandidate {
    pub fn new(w: FieldElement) -> Self {
        let curve = Curve::new(
            FieldElement::zero(),
            FieldElement::zero(),
            FieldElement::zero(),
            FieldElement::zero(),
            &FieldElement::from_int(-1728) * &w,
        );
        EwCandidate { w, curve, points: Vec::new() }
    }
}

struct Embedding {
    rho: f64,
    z: (f64, f64),
    z2: (f64, f64),
    inv: [[f64; 3]; 3],
}

fn embedding() -> &'static Embedding {
    static E: OnceLock<Embedding> = OnceLock::new();
    E.get_or_init(|| {
        let rho = FieldElement::a().embeddings().0;
        let z = complex_root();
        let z2 = (z.0 * z.0 - z.1 * z.1, 2.0 * z.0 * z.1);
        let m = [[1.0, rho, rho * rho], [1.0, z.0, z2.0], [0.0, z.1, z2.1]];
        Embedding { rho, z, z2, inv: invert3(&m) }
    })
}

fn invert3(m: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    let mut r = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let (a, b) = ((j + 1) % 3, (j + 2) % 3);
            let (c, d) = ((i + 1) % 3, (i + 2) % 3);
            r[i][j] = (m[a][c] * m[b][d] - m[a][d] * m[b][c]) / det;
        }
    }
    r
}

/// Skew sweep width. Each extra step adds a full box of volume, and on the
/// examples tried the unskewed box reached every point soonest.
const SKEW: i32 = 0;
const COVOLUME: f64 = 2.397_915_761_656_36; // √23 / 2

/// Residues mod 24 that are squares at 2 and at 3 (as c4 of a model with good
/// reduction there must be, up to unit squares).
struct Residue24 {
    rows: Vec<Vec<i64>>,
}

impl Residue24 {
    fn new(check2: bool, check3: bool) -> Self {
        let sq = |m: i64| -> BTreeSet<[i64; 3]> {
            let mut s = BTreeSet::new();
            for y0 in 0..m {
                for y1 in 0..m {
                    for y2 in 0..m {
                        let t = tmul(&[y0 as i128, y1 as i128, y2 as i128], &[y0 as i128, y1 as i128, y2 as i128]);
                        s.insert([t[0].rem_euclid(m as i128) as i64, t[1].rem_euclid(m as i128) as i64, t[2].rem_euclid(m as i128) as i64]);
                    }
                }
            }
            s
        };
        let s8 = sq(8);
        let s3 = sq(3);
        let mut allowed = vec![false; 24 * 24 * 24];
        for c0 in 0..24 {
            for c1 in 0..24 {
                for c2 in 0..24 {
                    let ok8 = !check2 || s8.contains(&[c0 % 8, c1 % 8, c2 % 8]);
                    let ok3 = !check3 || s3.contains(&[c0 % 3, c1 % 3, c2 % 3]);
                    allowed[((c0 * 24 + c1) * 24 + c2) as usize] = ok8 && ok3;
                }
            }
        }
        let rows = (0..24 * 24)
            .map(|k| (0..24).filter(|&r0| allowed[r0 * 24 * 24 + k]).map(|r0| r0 as i64).collect())
            .collect();
        Residue24 { rows }
    }

    #[cfg(test)]
    fn ok(&self, c: [i64; 3]) -> bool {
        self.row(c[1], c[2]).contains(&c[0].rem_euclid(24))
    }

    /// Allowed c0 mod 24 for the given c1, c2.
    fn row(&self, c1: i64, c2: i64) -> &[i64] {
        &self.rows[c1.rem_euclid(24) as usize * 24 + c2.rem_euclid(24) as usize]
    }
}

/// Parts of the sorted disjoint intervals `outer` not covered by `inner`.
fn subtract(outer: &[(i64, i64)], inner: &[(i64, i64)]) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    for &(mut lo, hi) in outer {
        for &(a, b) in inner {
            if b < lo || a > hi {
                continue;
            }
            if a > lo {
                out.push((lo, a - 1));
            }
            lo = lo.max(b + 1);
        }
        if lo <= hi {
            out.push((lo, hi));
        }
    }
    out
}

struct QrFilter {
    p: u64,
    r: u64,
    r2: u64,
    w: u64,
    square: Vec<bool>,
}

fn reduce_at(x: &FieldElement, p: u64, r: u64) -> Option<u64> {
    let mut acc = 0u64;
    for k in (0..3).rev() {
        let q = &x.coords()[k];
        let d = crate::arith::big_mod_u64(q.denom(), p);
        let inv = crate::arith::inv_mod(d, p)?;
        let v = crate::arith::big_mod_u64(q.numer(), p);
        acc = (crate::arith::mul_mod(acc, r, p) + crate::arith::mul_mod(v, inv, p)) % p;
    }
    Some(acc)
}

fn qr_filters(w1728: &FieldElement, count: usize) -> Vec<QrFilter> {
    let mut out = Vec::new();
    let mut p = 1000u64;
    while out.len() < count {
        p = next_prime(p);
        let roots = modp::roots(&modp::from_i64(&[1, 0, -1, 1], p), p);
        for r in roots {
            if out.len() == count {
                break;
            }
            let Some(w) = reduce_at(w1728, p, r) else { continue };
            let mut square = vec![false; p as usize];
            for y in 0..p {
                square[(y * y % p) as usize] = true;
            }
            out.push(QrFilter { p, r, r2: r * r % p, w, square });
        }
    }
    out
}

/// Points found in one height shell, with the number of lattice points tested.
struct ShellResult {
    points: Vec<(FieldElement, FieldElement)>,
    tested: u64,
}

struct PointSearcher {
    w1728: FieldElement,
    wr: f64,
    wc: f64,
    residues: Option<Residue24>,
    filters: Vec<QrFilter>,
}

impl PointSearcher {
    fn new(w: &FieldElement, weight: &FieldElement, residues: Option<Residue24>) -> Self {
        let (r, (x, y)) = (&FieldElement::from_int(1728) * weight).embeddings();
        let w1728 = &FieldElement::from_int(1728) * w;
        PointSearcher {
            filters: qr_filters(&w1728, 8),
            w1728,
            wr: r.abs().cbrt().max(1e-300),
            wc: (x * x + y * y).sqrt().cbrt().max(1e-300),
            residues,
        }
    }

    /// Expected lattice points for heights up to h. The skew boxes form a staircase whose
    /// area is 1 + SKEW full boxes.
    fn volume(&self, h: f64) -> f64 {
        (1 + SKEW) as f64 * 2.0 * std::f64::consts::PI * h * h * h * self.wr * self.wc * self.wc / COVOLUME
    }

    fn height_for_budget(&self, budget: f64) -> f64 {
        (budget / self.volume(1.0)).cbrt()
    }

    /// Skewed height of a point with weighted archimedean sizes hr and hc.
    fn height(&self, hr: f64, hc: f64) -> f64 {
        let at = |k: i32| {
            let s = 2f64.powi(k);
            (hr / s).max(hc * s.sqrt())
        };
        if hc == 0.0 {
            return at(SKEW);
        }
        let k0 = ((hr / hc).log2() * 2.0 / 3.0).floor() as i32;
        let k0 = k0.clamp(-SKEW, SKEW);
        at(k0).min(at((k0 + 1).min(SKEW)))
    }

    /// Union of the c0 ranges of all skew boxes of height h on the line (c1, c2).
    fn row(&self, h: f64, tr: f64, tre: f64, tim: f64) -> Vec<(i64, i64)> {
        let mut iv = Vec::with_capacity(2 * SKEW as usize + 1);
        for k in -SKEW..=SKEW {
            let s = 2f64.powi(k);
            let ra = h * s * self.wr;
            let rc = h / s.sqrt() * self.wc;
            if tim.abs() > rc {
                continue;
            }
            let half = (rc * rc - tim * tim).sqrt();
            let lo = (-ra - tr).max(-half - tre).ceil() as i64;
            let hi = (ra - tr).min(half - tre).floor() as i64;
            if lo <= hi {
                iv.push((lo, hi));
            }
        }
        iv.sort();
        let mut out: Vec<(i64, i64)> = Vec::with_capacity(iv.len());
        for (lo, hi) in iv {
            match out.last_mut() {
                Some(last) if lo <= last.1 + 1 => last.1 = last.1.max(hi),
                _ => out.push((lo, hi)),
            }
        }
        out
    }

    fn shell(&self, lo: f64, hi: f64) -> ShellResult {
        let e = embedding();
        let mut points = Vec::new();
        let mut tested = 0u64;
        let mut b = [0i64; 3];
        for k in -SKEW..=SKEW {
            let s = 2f64.powi(k);
            let ra = hi * s * self.wr;
            let rc = hi / s.sqrt() * self.wc;
            for (i, bi) in b.iter_mut().enumerate() {
                let v = (e.inv[i][0].abs() * ra + (e.inv[i][1].powi(2) + e.inv[i][2].powi(2)).sqrt() * rc).floor() as i64;
                *bi = (*bi).max(v);
            }
        }
        for c2 in -b[2]..=b[2] {
            for c1 in -b[1]..=b[1] {
                let tr = c1 as f64 * e.rho + c2 as f64 * e.rho * e.rho;
                let tre = c1 as f64 * e.z.0 + c2 as f64 * e.z2.0;
                let tim = c1 as f64 * e.z.1 + c2 as f64 * e.z2.1;
                let outer = self.row(hi, tr, tre, tim);
                if outer.is_empty() {
                    continue;
                }
                let inner = if lo > 0.0 { self.row(lo, tr, tre, tim) } else { Vec::new() };
                const ALL: [i64; 24] = [0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20, 21, 22, 23];
                let residues: &[i64] = match &self.residues {
                    Some(res) => res.row(c1, c2),
                    None => &ALL,
                };
                for (a, z) in subtract(&outer, &inner) {
                    let mut base = a.div_euclid(24) * 24;
                    while base <= z {
                        for &r in residues {
                            let c0 = base + r;
                            if c0 < a {
                                continue;
                            }
                            if c0 > z {
                                break;
                            }
                            let xr = c0 as f64 + tr;
                            let xc = ((c0 as f64 + tre).powi(2) + tim * tim).sqrt();
                            let h = self.height(xr.abs() / self.wr, xc / self.wc);
                            if h <= lo || h > hi {
                                continue;
                            }
                            tested += 1;
                            if let Some(pt) = self.check(c0, c1, c2) {
                                points.push(pt);
                            }
                        }
                        base += 24;
                    }
                }
            }
        }
        points.sort();
        ShellResult { points, tested }
    }

    fn check(&self, c0: i64, c1: i64, c2: i64) -> Option<(FieldElement, FieldElement)> {
        for f in &self.filters {
            let p = f.p as i64;
            let x = ((c0.rem_euclid(p) as u64) + (c1.rem_euclid(p) as u64) * f.r % f.p + (c2.rem_euclid(p) as u64) * f.r2 % f.p) % f.p;
            let v = (pow_mod(x, 3, f.p) + f.p - f.w) % f.p;
            if !f.square[v as usize] {
                return None;
            }
        }
        let x = FieldElement::from_ints(c0, c1, c2);
        let rhs = &(&(&x * &x) * &x) - &self.w1728;
        let y = rhs.sqrt()?;
        Some((x, y))
    }
}

/// Integral X on E_w with weighted height at most `bound`, where the height
/// of X is min over skews s = 2^k (|k| ≤ SKEW) of max(|X|_ℝ/(s·|W|_ℝ^{1/3}),
/// |X|_ℂ·√s/|W|_ℂ^{1/3}) and W = 1728·disc_weight. Both signs of Y are returned.
pub fn weighted_point_search(ew: &EwCandidate, disc_weight: &FieldElement, bound: u64) -> Vec<(FieldElement, FieldElement)> {
    if bound == 0 {
        return Vec::new();
    }
    let s = PointSearcher::new(&ew.w, disc_weight, None);
    let mut out = BTreeSet::new();
    for (x, y) in s.shell(-1.0, bound as f64).points {
        out.insert((x.clone(), -&y));
        out.insert((x, y));
    }
    out.into_iter().collect()
}

/// Curves with good reduction outside S coming from a point (x, y) on E_w:
/// Y² = X³ − 3xu₀²X − 2yu₀³ with (3u₀)⁶w ∈ F(S,12), and its twists by F(S,2).
pub fn curves_from_w(w: &FieldElement, point: (&FieldElement, &FieldElement), s: &[PrimeIdeal]) -> Result<Vec<Curve>> {
    let (x, y) = point;
    if x.is_zero() || y.is_zero() {
        return Err(Error::DegenerateJ);
    }
    // (3u₀) absorbs π_p for primes outside S where ord_p(w) ≡ 6 mod 12
    let mut t = FieldElement::one();
    for (p, e) in crate::ideal::factor_element(w) {
        if !s.contains(&p) && e.rem_euclid(12) == 6 {
            t = &t * &p.generator;
        }
    }
    let u0 = &t / &FieldElement::from_int(3);
    let u02 = &u0 * &u0;
    let base = Curve::new(
        FieldElement::zero(),
        FieldElement::zero(),
        FieldElement::zero(),
        &(&FieldElement::from_int(-3) * x) * &u02,
        &(&FieldElement::from_int(-2) * y) * &(&u02 * &u0),
    );
    let twists = selmer_group(s, 2, None)?.elements();
    let mut small: Vec<PrimeIdeal> = Vec::new();
    for q in [2u64, 3] {
        for p in factor_rational_prime(q).iter() {
            if !s.contains(p) {
                small.push(p.clone());
            }
        }
    }
    let z = FieldElement::zero;
    let mut out = Vec::new();
    for u in twists {
        let u2 = &u * &u;
        let c = Curve::new(z(), z(), z(), &base.a4 * &u2, &base.a6 * &(&u2 * &u));
        if !small.iter().all(|p| tate_local(&c, p).map(|l| l.conductor_exponent == 0).unwrap_or(false)) {
            continue;
        }
        let g = conductor_and_minimal_model(&c)?;
        if factor_ideal(&g.conductor).iter().all(|(p, _)| s.contains(p)) {
            out.push(g.minimal);
        }
    }
    Ok(dedup_isomorphic(out))
}

/// Curves with j = 0 or 1728 and good reduction outside S.
pub fn degenerate_j_curves(s: &[PrimeIdeal]) -> Result<Vec<Curve>> {
    let mut t: Vec<PrimeIdeal> = s.to_vec();
    for q in [2u64, 3] {
        for p in factor_rational_prime(q).iter() {
            if !t.contains(p) {
                t.push(p.clone());
            }
        }
    }
    let z = FieldElement::zero;
    let mut out = Vec::new();
    for k in selmer_group(&t, 6, None)?.elements() {
        out.push(Curve::new(z(), z(), z(), z(), k));
    }
    for k in selmer_group(&t, 4, None)?.elements() {
        out.push(Curve::new(z(), z(), z(), k, z()));
    }
    let extra: Vec<&PrimeIdeal> = t.iter().filter(|p| !s.contains(p)).collect();
    let mut good = Vec::new();
    'curves: for c in out {
        for p in &extra {
            if tate_local(&c, p)?.conductor_exponent > 0 {
                continue 'curves;
            }
        }
        let g = conductor_and_minimal_model(&c)?;
        if factor_ideal(&g.conductor).iter().all(|(p, _)| s.contains(p)) {
            good.push(g.minimal);
        }
    }
    Ok(dedup_isomorphic(good))
}

#[derive(Clone, Debug, PartialEq)]
pub struct EffortRecord {
    pub candidate: usize,
    pub w: String,
    pub round: u32,
    pub height: f64,
    pub points_tested: u64,
    pub points_found: usize,
    pub curves_found: usize,
    pub millis: u128,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PrescribedOutcome {
    /// Every curve of the target conductor found, closed under isogeny.
    pub curves: Vec<Curve>,
    /// Curves found directly from points on some E_w.
    pub hits: Vec<Curve>,
    pub candidates: usize,
    pub log: Vec<EffortRecord>,
}

pub const DEFAULT_EFFORT: u32 = 5;
const BASE_BUDGET: f64 = 1.0e4;

/// Candidate w ∈ F(S,6)_{12}, most likely first: ascending |Norm(w)|, then T₂.
pub fn w_candidates(s: &[PrimeIdeal]) -> Result<Vec<FieldElement>> {
    let sel = selmer_group(s, 6, Some(12))?;
    let mut ws: Vec<(BigInt, f64, FieldElement)> =
        sel.elements().into_iter().map(|w| (w.norm().numer().abs(), w.t2(), w)).collect();
    ws.sort_by(|x, y| x.0.cmp(&y.0).then(x.1.total_cmp(&y.1)).then(x.2.cmp(&y.2)));
    Ok(ws.into_iter().map(|t| t.2).collect())
}

pub fn prescribed_reduction_search(conductor: &IdealHNF, effort: u32) -> Result<Vec<Curve>> {
    Ok(prescribed_reduction_search_logged(conductor, effort)?.curves)
}

/// Round r gives every candidate a budget of 10⁴·8^r lattice points, searched
/// as a new height shell on top of the previous rounds.
pub fn prescribed_reduction_search_logged(conductor: &IdealHNF, effort: u32) -> Result<PrescribedOutcome> {
    let s: Vec<PrimeIdeal> = factor_ideal(conductor).into_iter().map(|(p, _)| p).collect();
    if conductor.is_unit() {
        return Ok(PrescribedOutcome { curves: vec![], hits: vec![], candidates: 0, log: vec![] });
    }
    let ws = w_candidates(&s)?;
    let in_s = |q: u64| factor_rational_prime(q).iter().all(|p| s.contains(p));
    let (check2, check3) = (!in_s(2), !in_s(3));
    let searchers: Vec<PointSearcher> =
        ws.iter().map(|w| PointSearcher::new(w, w, Some(Residue24::new(check2, check3)))).collect();
    let mut heights = vec![0.0f64; ws.len()];
    let mut seen_x: Vec<BTreeSet<FieldElement>> = vec![BTreeSet::new(); ws.len()];
    let mut hits: Vec<Curve> = Vec::new();
    let mut log = Vec::new();
    for round in 0..effort {
        let budget = BASE_BUDGET * 8f64.powi(round as i32);
        if round == 0 {
            for c in degenerate_j_curves(&s)? {
                if conductor_and_minimal_model(&c)?.conductor == *conductor {
                    hits.push(c);
                }
            }
        }
        for (i, w) in ws.iter().enumerate() {
            let start = Instant::now();
            let h = searchers[i].height_for_budget(budget);
            let res = searchers[i].shell(heights[i], h);
            heights[i] = h;
            let mut found = 0;
            let npts = res.points.len();
            for (x, y) in res.points {
                if !seen_x[i].insert(x.clone()) {
                    continue;
                }
                let cs = match curves_from_w(w, (&x, &y), &s) {
                    Err(Error::DegenerateJ) => continue,
                    r => r?,
                };
                for c in cs {
                    if conductor_and_minimal_model(&c)?.conductor == *conductor {
                        found += 1;
                        hits.push(c);
                    }
                }
            }
            log.push(EffortRecord {
                candidate: i,
                w: w.to_string(),
                round,
                height: h,
                points_tested: res.tested,
                points_found: npts,
                curves_found: found,
                millis: start.elapsed().as_millis(),
            });
        }
    }
    let hits = dedup_isomorphic(hits);
    let mut curves: Vec<Curve> = Vec::new();
    for h in &hits {
        if curves.iter().any(|c| c.is_isomorphic(h).is_some()) {
            continue;
        }
        curves.extend(isogeny_class(h)?.curves);
    }
    Ok(PrescribedOutcome { curves: dedup_isomorphic(curves), hits, candidates: ws.len(), log })
}
