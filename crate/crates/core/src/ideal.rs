//! Integral ideals of O_F = Z[a] in Hermite normal form, prime ideals and
//! principal generators.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

use crate::arith::{factor_bigint, primes_up_to};
use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::poly::modp::{self, Fpx};

pub type IntVec = [BigInt; 3];

fn zero_vec() -> IntVec {
    [BigInt::zero(), BigInt::zero(), BigInt::zero()]
}

fn unit_vec(i: usize, d: &BigInt) -> IntVec {
    let mut v = zero_vec();
    v[i] = d.clone();
    v
}

fn sub_mul(a: &mut IntVec, q: &BigInt, b: &IntVec) {
    for i in 0..3 {
        a[i] -= q * &b[i];
    }
}

/// Integral ideal as the row-style upper-triangular HNF of its Z-basis.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct IdealHNF {
    rows: [IntVec; 3],
}

/// Upper-triangular HNF of the lattice spanned by `vecs`. `modulus` must be a
/// positive integer known to lie in the lattice; it bounds intermediate entries.
pub fn hnf(vecs: Vec<IntVec>, modulus: Option<&BigInt>) -> Option<[IntVec; 3]> {
    let mut rows: Vec<(IntVec, bool)> = vecs.into_iter().map(|v| (v, false)).collect();
    if let Some(d) = modulus {
        for r in rows.iter_mut() {
            for x in r.0.iter_mut() {
                *x = x.mod_floor(d);
            }
        }
        for i in 0..3 {
            rows.push((unit_vec(i, d), true));
        }
    }
    let mut out: Vec<IntVec> = Vec::with_capacity(3);
    for c in 0..3 {
        loop {
            rows.retain(|(r, _)| r.iter().any(|x| !x.is_zero()));
            let nz: Vec<usize> = (0..rows.len()).filter(|&i| !rows[i].0[c].is_zero()).collect();
            if nz.is_empty() {
                return None;
            }
            if nz.len() == 1 {
                let (mut piv, _) = rows.remove(nz[0]);
                if piv[c].is_negative() {
                    for x in piv.iter_mut() {
                        *x = -&*x;
                    }
                }
                out.push(piv);
                break;
            }
            let k = *nz.iter().min_by_key(|&&i| rows[i].0[c].abs()).unwrap();
            let pk = rows[k].0.clone();
            for &i in &nz {
                if i == k {
                    continue;
                }
                let q = rows[i].0[c].div_floor(&pk[c]);
                sub_mul(&mut rows[i].0, &q, &pk);
                rows[i].1 = false;
                if let Some(d) = modulus {
                    for j in c + 1..3 {
                        rows[i].0[j] = rows[i].0[j].mod_floor(d);
                    }
                }
            }
        }
    }
    let mut m: [IntVec; 3] = [out[0].clone(), out[1].clone(), out[2].clone()];
    for c in 1..3 {
        for r in 0..c {
            let q = m[r][c].div_floor(&m[c][c]);
            let row_c = m[c].clone();
            sub_mul(&mut m[r], &q, &row_c);
        }
    }
    Some(m)
}

fn elt(v: &IntVec) -> FieldElement {
    FieldElement::from_bigints(v.clone())
}

fn to_vec(x: &FieldElement) -> IntVec {
    x.int_coords().expect("integral element")
}

fn abs_norm_int(x: &FieldElement) -> BigInt {
    x.norm().abs().to_integer()
}

impl IdealHNF {
    pub fn unit() -> Self {
        let one = BigInt::one();
        IdealHNF { rows: [unit_vec(0, &one), unit_vec(1, &one), unit_vec(2, &one)] }
    }

    pub fn from_rows(rows: [IntVec; 3]) -> Result<Self> {
        let v: Vec<IntVec> = rows.to_vec();
        let m = hnf(v, None).ok_or(Error::ZeroIdeal)?;
        let id = IdealHNF { rows: m };
        // must be an ideal: closed under multiplication by a
        for r in &id.rows {
            if !id.contains(&(&elt(r) * &FieldElement::a())) {
                return Err(Error::parse("ideal rows", "lattice is not closed under multiplication by a"));
            }
        }
        Ok(id)
    }

    pub fn rows(&self) -> &[IntVec; 3] {
        &self.rows
    }

    pub fn from_generators(gens: &[FieldElement]) -> Result<Self> {
        let mut vecs = Vec::new();
        let mut modulus = BigInt::zero();
        let a = FieldElement::a();
        for g in gens {
            if g.is_zero() {
                continue;
            }
            let gv = g.int_coords().ok_or_else(|| Error::parse(g.to_string(), "generator is not integral"))?;
            let ga = g * &a;
            let gaa = &ga * &a;
            vecs.push(gv);
            vecs.push(to_vec(&ga));
            vecs.push(to_vec(&gaa));
            modulus = modulus.gcd(&abs_norm_int(g));
        }
        if vecs.is_empty() {
            return Err(Error::ZeroIdeal);
        }
        let m = hnf(vecs, Some(&modulus)).ok_or(Error::ZeroIdeal)?;
        Ok(IdealHNF { rows: m })
    }

    pub fn principal(g: &FieldElement) -> Result<Self> {
        Self::from_generators(std::slice::from_ref(g))
    }

    pub fn from_int(n: i64) -> Result<Self> {
        Self::principal(&FieldElement::from_int(n))
    }

    pub fn norm(&self) -> BigInt {
        &self.rows[0][0] * &self.rows[1][1] * &self.rows[2][2]
    }

    pub fn is_unit(&self) -> bool {
        self.norm().is_one()
    }

    pub fn basis(&self) -> [FieldElement; 3] {
        [elt(&self.rows[0]), elt(&self.rows[1]), elt(&self.rows[2])]
    }

    pub fn contains(&self, x: &FieldElement) -> bool {
        let Some(mut v) = x.int_coords() else {
            return false;
        };
        for c in 0..3 {
            let (q, r) = v[c].div_rem(&self.rows[c][c]);
            if !r.is_zero() {
                return false;
            }
            let row = self.rows[c].clone();
            sub_mul(&mut v, &q, &row);
        }
        true
    }

    /// Canonical representative of v modulo the ideal.
    pub fn reduce_vec(&self, v: &IntVec) -> IntVec {
        let mut v = v.clone();
        for c in 0..3 {
            let q = v[c].div_floor(&self.rows[c][c]);
            let row = self.rows[c].clone();
            sub_mul(&mut v, &q, &row);
        }
        v
    }

    pub fn mul(&self, o: &IdealHNF) -> IdealHNF {
        let mut vecs = Vec::with_capacity(9);
        for x in self.basis() {
            for y in o.basis() {
                vecs.push(to_vec(&(&x * &y)));
            }
        }
        let n = self.norm() * o.norm();
        IdealHNF { rows: hnf(vecs, Some(&n)).expect("product of nonzero ideals") }
    }

    pub fn pow(&self, e: u32) -> IdealHNF {
        let mut acc = IdealHNF::unit();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn add(&self, o: &IdealHNF) -> IdealHNF {
        let mut vecs: Vec<IntVec> = self.rows.to_vec();
        vecs.extend(o.rows.iter().cloned());
        let n = self.norm().gcd(&o.norm());
        IdealHNF { rows: hnf(vecs, Some(&n)).expect("sum of nonzero ideals") }
    }

    /// `self | o`, i.e. `o ⊆ self`.
    pub fn divides(&self, o: &IdealHNF) -> bool {
        o.basis().iter().all(|x| self.contains(x))
    }

    /// `self / d` when `d | self`.
    pub fn quotient(&self, d: &IdealHNF) -> Result<IdealHNF> {
        if !d.divides(self) {
            return Err(Error::NonIntegralQuotient);
        }
        if d.is_unit() {
            return Ok(self.clone());
        }
        let g = principal_generator(d);
        self.div_by_element(&g)
    }

    /// `self · (1/g)`, which must be integral.
    pub fn div_by_element(&self, g: &FieldElement) -> Result<IdealHNF> {
        let gi = g.inv();
        let mut vecs = Vec::new();
        for x in self.basis() {
            let y = &x * &gi;
            vecs.push(y.int_coords().ok_or(Error::NonIntegralQuotient)?);
            let ya = &y * &FieldElement::a();
            vecs.push(to_vec(&ya));
            vecs.push(to_vec(&(&ya * &FieldElement::a())));
        }
        let n = self.norm() / abs_norm_int(g);
        Ok(IdealHNF { rows: hnf(vecs, Some(&n)).ok_or(Error::ZeroIdeal)? })
    }

    /// Generator string "(g)" using the canonical principal generator.
    pub fn generator_string(&self) -> String {
        format!("({})", principal_generator(self))
    }

    pub fn hnf_string(&self) -> String {
        let r = &self.rows;
        format!(
            "[[{},{},{}],[{},{},{}],[{},{},{}]]",
            r[0][0], r[0][1], r[0][2], r[1][0], r[1][1], r[1][2], r[2][0], r[2][1], r[2][2]
        )
    }

    fn flat(&self) -> Vec<&BigInt> {
        self.rows.iter().flat_map(|r| r.iter()).collect()
    }
}

impl Ord for IdealHNF {
    fn cmp(&self, o: &Self) -> Ordering {
        self.norm().cmp(&o.norm()).then_with(|| self.flat().cmp(&o.flat()))
    }
}

impl PartialOrd for IdealHNF {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Display for IdealHNF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.hnf_string())
    }
}

impl FromStr for IdealHNF {
    type Err = Error;

    /// Accepts "(generator)", a bare generator, or HNF rows "[[..],[..],[..]]".
    fn from_str(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t.starts_with("[[") {
            let nums: Vec<BigInt> = t
                .split(['[', ']', ','])
                .filter(|x| !x.is_empty())
                .map(|x| x.parse::<BigInt>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::parse(s.to_string(), "bad HNF entry"))?;
            if nums.len() != 9 {
                return Err(Error::parse(s.to_string(), "HNF needs 9 entries"));
            }
            let row = |i: usize| [nums[3 * i].clone(), nums[3 * i + 1].clone(), nums[3 * i + 2].clone()];
            return IdealHNF::from_rows([row(0), row(1), row(2)]);
        }
        let g: FieldElement = t.parse()?;
        IdealHNF::principal(&g)
    }
}

// ---------------------------------------------------------------------------
// Principal generators

fn gen_cache() -> &'static Mutex<HashMap<IdealHNF, FieldElement>> {
    static C: OnceLock<Mutex<HashMap<IdealHNF, FieldElement>>> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

fn big_f64(x: &BigInt) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}

fn embed_vec(v: &IntVec) -> [f64; 3] {
    let r = crate::field::REAL_ROOT;
    let (zr, zi) = crate::field::complex_root();
    let z2r = zr * zr - zi * zi;
    let z2i = 2.0 * zr * zi;
    let c = [big_f64(&v[0]), big_f64(&v[1]), big_f64(&v[2])];
    let s2 = std::f64::consts::SQRT_2;
    [c[0] + c[1] * r + c[2] * r * r, s2 * (c[0] + c[1] * zr + c[2] * z2r), s2 * (c[1] * zi + c[2] * z2i)]
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn gso(b: &[IntVec; 3]) -> ([[f64; 3]; 3], [f64; 3]) {
    let e: Vec<[f64; 3]> = b.iter().map(embed_vec).collect();
    let mut bstar = [[0.0; 3]; 3];
    let mut mu = [[0.0; 3]; 3];
    let mut bb = [0.0; 3];
    for i in 0..3 {
        let mut v = e[i];
        for j in 0..i {
            mu[i][j] = dot(&e[i], &bstar[j]) / bb[j];
            for t in 0..3 {
                v[t] -= mu[i][j] * bstar[j][t];
            }
        }
        bstar[i] = v;
        bb[i] = dot(&v, &v);
    }
    (mu, bb)
}

/// LLL-reduce a Z-basis of O_F-lattice under the T₂ form.
pub fn lll_t2(mut b: [IntVec; 3]) -> [IntVec; 3] {
    let mut k = 1;
    let mut guard = 0;
    while k < 3 && guard < 100_000 {
        guard += 1;
        for j in (0..k).rev() {
            let (mu, _) = gso(&b);
            let m = mu[k][j];
            if m.abs() > 0.5 {
                let q = BigInt::from_f64(m.round()).unwrap_or_else(BigInt::zero);
                let bj = b[j].clone();
                sub_mul(&mut b[k], &q, &bj);
            }
        }
        let (mu, bb) = gso(&b);
        if bb[k] >= (0.99 - mu[k][k - 1] * mu[k][k - 1]) * bb[k - 1] {
            k += 1;
        } else {
            b.swap(k, k - 1);
            k = (k - 1).max(1);
        }
    }
    b
}

/// Canonical associate: minimize T₂ over g·aᵏ, make the first nonzero
/// coordinate positive, then take the lexicographically least.
pub fn canonical_associate(g: &FieldElement) -> FieldElement {
    if g.is_zero() {
        return g.clone();
    }
    let a = FieldElement::a();
    let ainv = a.inv();
    let mut cur = g.clone();
    let mut t = cur.t2();
    for _ in 0..10_000 {
        let up = &cur * &a;
        let down = &cur * &ainv;
        let (tu, td) = (up.t2(), down.t2());
        if tu < t && tu <= td {
            cur = up;
            t = tu;
        } else if td < t {
            cur = down;
            t = td;
        } else {
            break;
        }
    }
    let cands = [&cur * &ainv, cur.clone(), &cur * &a];
    let tmin = cands.iter().map(|c| c.t2()).fold(f64::INFINITY, f64::min);
    cands
        .iter()
        .filter(|c| c.t2() <= tmin * (1.0 + 1e-9))
        .map(sign_normalize)
        .min()
        .unwrap()
}

fn sign_normalize(x: &FieldElement) -> FieldElement {
    for c in x.coords() {
        if !c.is_zero() {
            return if c.is_negative() { -x } else { x.clone() };
        }
    }
    x.clone()
}

/// Canonical generator of a (necessarily principal) ideal.
pub fn principal_generator(id: &IdealHNF) -> FieldElement {
    if let Some(g) = gen_cache().lock().unwrap().get(id) {
        return g.clone();
    }
    let n = id.norm();
    let b = lll_t2(id.rows.clone());
    let mut found: Option<FieldElement> = None;
    'outer: for r in 1i64..=12 {
        for c0 in -r..=r {
            for c1 in -r..=r {
                for c2 in -r..=r {
                    if c0.abs().max(c1.abs()).max(c2.abs()) != r && r > 1 {
                        continue;
                    }
                    let mut v = zero_vec();
                    for (k, c) in [c0, c1, c2].iter().enumerate() {
                        for i in 0..3 {
                            v[i] += &b[k][i] * c;
                        }
                    }
                    let x = elt(&v);
                    if x.is_zero() {
                        continue;
                    }
                    if abs_norm_int(&x) == n {
                        found = Some(x);
                        break 'outer;
                    }
                }
            }
        }
    }
    let g = canonical_associate(&found.expect("class number one: generator exists"));
    gen_cache().lock().unwrap().insert(id.clone(), g.clone());
    g
}

// ---------------------------------------------------------------------------
// Prime ideals

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PrimeIdeal {
    pub p: u64,
    pub e: u32,
    pub f: u32,
    pub ideal: IdealHNF,
    /// Canonical generator π with (π) = P.
    pub generator: FieldElement,
    /// Monic factor of x³ − x² + 1 mod p; a maps to x in F_p[x]/(this).
    pub residue_poly: Fpx,
    // N(π)/π, used for exact division by π
    pi_conj: FieldElement,
    pi_norm: BigInt,
}

impl PrimeIdeal {
    pub fn norm(&self) -> u64 {
        self.p.checked_pow(self.f).expect("prime norm fits in u64")
    }

    pub fn norm_big(&self) -> BigInt {
        BigInt::from(self.p).pow(self.f)
    }

    /// Exact division by π if possible.
    pub fn divide_by_pi(&self, x: &FieldElement) -> Option<FieldElement> {
        let y = x * &self.pi_conj;
        let c = y.int_coords()?;
        if c.iter().all(|v| v.is_multiple_of(&self.pi_norm)) {
            Some(FieldElement::from_bigints([&c[0] / &self.pi_norm, &c[1] / &self.pi_norm, &c[2] / &self.pi_norm]))
        } else {
            None
        }
    }

    /// v_P of an integral nonzero element.
    fn val_integral(&self, x: &FieldElement) -> i64 {
        if self.f == 3 {
            // P = (p): valuation is the p-adic valuation of the content
            let c = x.int_coords().unwrap();
            let p = BigInt::from(self.p);
            return c
                .iter()
                .filter(|v| !v.is_zero())
                .map(|v| {
                    let mut v = v.clone();
                    let mut k = 0;
                    while v.is_multiple_of(&p) {
                        v /= &p;
                        k += 1;
                    }
                    k
                })
                .min()
                .unwrap();
        }
        let mut k = 0;
        let mut y = x.clone();
        while let Some(z) = self.divide_by_pi(&y) {
            y = z;
            k += 1;
        }
        k
    }

    /// v_P(x); `None` for x = 0.
    pub fn valuation(&self, x: &FieldElement) -> Option<i64> {
        if x.is_zero() {
            return None;
        }
        let d = x.denominator();
        let num = x.scale(&BigRational::from_integer(d.clone()));
        let mut vd = 0i64;
        let p = BigInt::from(self.p);
        let mut dd = d;
        while dd.is_multiple_of(&p) {
            dd /= &p;
            vd += 1;
        }
        Some(self.val_integral(&num) - vd * self.e as i64)
    }

    pub fn ideal_valuation(&self, id: &IdealHNF) -> u32 {
        id.basis().iter().filter(|x| !x.is_zero()).map(|x| self.val_integral(x)).min().unwrap_or(0) as u32
    }
}

impl Ord for PrimeIdeal {
    fn cmp(&self, o: &Self) -> Ordering {
        self.ideal.cmp(&o.ideal)
    }
}

impl PartialOrd for PrimeIdeal {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Display for PrimeIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.generator)
    }
}

fn prime_cache() -> &'static Mutex<HashMap<u64, Arc<Vec<PrimeIdeal>>>> {
    static C: OnceLock<Mutex<HashMap<u64, Arc<Vec<PrimeIdeal>>>>> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

fn poly_at_a(g: &Fpx) -> FieldElement {
    let a = FieldElement::a();
    let mut acc = FieldElement::zero();
    for c in g.iter().rev() {
        acc = &(&acc * &a) + &FieldElement::from_int(*c as i64);
    }
    acc
}

/// Kummer–Dedekind factorization of pO_F, sorted by (norm, HNF).
pub fn factor_rational_prime(p: u64) -> Arc<Vec<PrimeIdeal>> {
    if let Some(v) = prime_cache().lock().unwrap().get(&p) {
        return v.clone();
    }
    let cubic = modp::from_i64(&[1, 0, -1, 1], p);
    let mut out = Vec::new();
    for (g, e) in modp::factor(&cubic, p) {
        let f = (g.len() - 1) as u32;
        let pe = FieldElement::from_int(p as i64);
        let ideal = if f == 3 {
            IdealHNF::principal(&pe).unwrap()
        } else {
            IdealHNF::from_generators(&[pe, poly_at_a(&g)]).unwrap()
        };
        let generator = principal_generator(&ideal);
        let pi_norm = generator.norm().to_integer();
        let pi_conj = generator.inv().scale(&BigRational::from_integer(pi_norm.clone()));
        let pi_norm = pi_norm.abs();
        out.push(PrimeIdeal { p, e, f, ideal, generator, residue_poly: g, pi_conj, pi_norm });
    }
    out.sort();
    let v = Arc::new(out);
    prime_cache().lock().unwrap().insert(p, v.clone());
    v
}

/// All prime ideals of norm at most `bound`, ordered by (norm, HNF).
pub fn primes_up_to_norm(bound: u64) -> Vec<PrimeIdeal> {
    let mut out = Vec::new();
    for p in primes_up_to(bound) {
        for pr in factor_rational_prime(p).iter() {
            if pr.norm_big() <= BigInt::from(bound) {
                out.push(pr.clone());
            }
        }
    }
    out.sort();
    out
}

/// Prime factorization of a nonzero ideal.
pub fn factor_ideal(id: &IdealHNF) -> Vec<(PrimeIdeal, u32)> {
    let mut out = Vec::new();
    for (p, _) in factor_bigint(&id.norm()) {
        let p = p.to_u64().expect("prime factor fits in u64");
        for pr in factor_rational_prime(p).iter() {
            let v = pr.ideal_valuation(id);
            if v > 0 {
                out.push((pr.clone(), v));
            }
        }
    }
    out.sort();
    out
}

/// Prime ideals dividing the principal ideal (x), with valuations.
pub fn factor_element(x: &FieldElement) -> Vec<(PrimeIdeal, i64)> {
    let n = x.norm();
    let mut out = Vec::new();
    let mut ps: Vec<BigInt> = factor_bigint(n.numer()).into_iter().map(|(p, _)| p).collect();
    ps.extend(factor_bigint(n.denom()).into_iter().map(|(p, _)| p));
    let d = x.denominator();
    ps.extend(factor_bigint(&d).into_iter().map(|(p, _)| p));
    ps.sort();
    ps.dedup();
    for p in ps {
        let p = p.to_u64().expect("prime factor fits in u64");
        for pr in factor_rational_prime(p).iter() {
            let v = pr.valuation(x).unwrap();
            if v != 0 {
                out.push((pr.clone(), v));
            }
        }
    }
    out.sort();
    out
}

pub fn ideal_from_factorization(fs: &[(PrimeIdeal, u32)]) -> IdealHNF {
    fs.iter().fold(IdealHNF::unit(), |acc, (p, e)| acc.mul(&p.ideal.pow(*e)))
}

/// All divisors of an ideal, sorted.
pub fn divisors(id: &IdealHNF) -> Vec<IdealHNF> {
    let fs = factor_ideal(id);
    let mut out = vec![IdealHNF::unit()];
    for (p, e) in fs {
        let mut next = Vec::new();
        for d in &out {
            let mut acc = d.clone();
            next.push(acc.clone());
            for _ in 0..e {
                acc = acc.mul(&p.ideal);
                next.push(acc.clone());
            }
        }
        out = next;
    }
    out.sort();
    out
}

/// All ideals of the given norm, sorted.
pub fn ideals_of_norm(n: u64) -> Vec<IdealHNF> {
    let mut out = vec![IdealHNF::unit()];
    if n == 0 {
        return Vec::new();
    }
    for (p, k) in crate::arith::factor_u64(n) {
        let primes = factor_rational_prime(p);
        // exponent vectors with Σ f_i e_i = k
        let mut choices: Vec<IdealHNF> = Vec::new();
        fn rec(primes: &[PrimeIdeal], i: usize, left: u32, acc: IdealHNF, out: &mut Vec<IdealHNF>) {
            if i == primes.len() {
                if left == 0 {
                    out.push(acc);
                }
                return;
            }
            let f = primes[i].f;
            let mut e = 0;
            let mut cur = acc;
            while e * f <= left {
                rec(primes, i + 1, left - e * f, cur.clone(), out);
                cur = cur.mul(&primes[i].ideal);
                e += 1;
            }
        }
        rec(&primes, 0, k, IdealHNF::unit(), &mut choices);
        let mut next = Vec::new();
        for d in &out {
            for c in &choices {
                next.push(d.mul(c));
            }
        }
        out = next;
    }
    out.sort();
    out
}

/// Number of ideals of norm exactly n.
pub fn count_ideals_of_norm(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut total = 1u64;
    for (p, k) in crate::arith::factor_u64(n) {
        let fs: Vec<u32> = factor_rational_prime(p).iter().map(|q| q.f).collect();
        // count solutions of Σ f_i e_i = k
        let mut ways = vec![0u64; k as usize + 1];
        ways[0] = 1;
        for f in fs {
            for s in f as usize..=k as usize {
                ways[s] += ways[s - f as usize];
            }
        }
        total *= ways[k as usize];
    }
    total
}

// ---------------------------------------------------------------------------
// Unit quotient of (O/m)^×

fn mul_by_a(v: &IntVec) -> IntVec {
    // (x0 + x1 a + x2 a²)·a = −x2 + x0 a + (x1 + x2) a²
    [-&v[2], v[0].clone(), &v[1] + &v[2]]
}

/// #(O/m)^×.
pub fn unit_group_order(m: &IdealHNF) -> BigInt {
    let mut n = m.norm();
    for (p, _) in factor_ideal(m) {
        let q = p.norm_big();
        n = n / &q * (q - 1);
    }
    n
}

/// Order of the image of ⟨−1, a⟩ in (O/m)^×.
pub fn unit_image_order(m: &IdealHNF) -> u64 {
    let one = m.reduce_vec(&[BigInt::one(), BigInt::zero(), BigInt::zero()]);
    let minus_one = m.reduce_vec(&[-BigInt::one(), BigInt::zero(), BigInt::zero()]);
    let mut x = one.clone();
    let mut ord = 0u64;
    let mut has_minus = minus_one == one;
    loop {
        x = m.reduce_vec(&mul_by_a(&x));
        ord += 1;
        if x == minus_one {
            has_minus = true;
        }
        if x == one {
            break;
        }
    }
    if has_minus {
        ord
    } else {
        2 * ord
    }
}

/// φ_u(m) = #((O/m)^× / image of O^×).
pub fn phi_u(m: &IdealHNF) -> u64 {
    if m.is_unit() {
        return 1;
    }
    let total = unit_group_order(m);
    (total / BigInt::from(unit_image_order(m))).to_u64().unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::fe;

    #[test]
    fn unit_and_principal() {
        assert_eq!(IdealHNF::principal(&FieldElement::one()).unwrap(), IdealHNF::unit());
        let i = IdealHNF::principal(&fe(-9, 0, 1)).unwrap();
        assert_eq!(i.norm(), BigInt::from(665));
        assert_eq!(IdealHNF::principal(&FieldElement::zero()), Err(Error::ZeroIdeal));
    }

    #[test]
    fn two_generator_ideal_matches_lattice_oracle() {
        let i = IdealHNF::from_generators(&[fe(5, 0, 0), fe(-2, 1, 0)]).unwrap();
        // oracle: HNF of the six generating vectors without the modular shortcut
        let a = FieldElement::a();
        let mut vecs = Vec::new();
        for g in [fe(5, 0, 0), fe(-2, 1, 0)] {
            vecs.push(to_vec(&g));
            vecs.push(to_vec(&(&g * &a)));
            vecs.push(to_vec(&(&(&g * &a) * &a)));
        }
        let plain = hnf(vecs, None).unwrap();
        assert_eq!(i.rows, plain);
        assert_eq!(i.norm(), BigInt::from(5));
    }

    #[test]
    fn splitting_of_small_primes() {
        let two = factor_rational_prime(2);
        assert_eq!(two.len(), 1);
        assert_eq!((two[0].e, two[0].f, two[0].norm()), (1, 3, 8));
        let five = factor_rational_prime(5);
        assert!(five.iter().any(|p| p.f == 1));
        assert_eq!(five.iter().map(|p| p.e * p.f).sum::<u32>(), 3);
        let t = factor_rational_prime(23);
        assert!(t.iter().any(|p| p.e > 1));
        assert_eq!(t.iter().map(|p| p.e * p.f).sum::<u32>(), 3);
    }

    #[test]
    fn factorization_reconstructs() {
        let x = fe(-9, 0, 1);
        let i = IdealHNF::principal(&x).unwrap();
        let fs = factor_ideal(&i);
        let norms: Vec<u64> = fs.iter().map(|(p, _)| p.norm()).collect();
        assert_eq!(norms, vec![5, 7, 19]);
        assert_eq!(ideal_from_factorization(&fs), i);
        assert!(factor_ideal(&IdealHNF::unit()).is_empty());
    }

    #[test]
    fn generators_up_to_units() {
        for g in [fe(-3, 14, 0), fe(1, -10, 1), fe(-3, 3, 0), fe(-9, 0, 1), fe(1, -14, 3)] {
            let i = IdealHNF::principal(&g).unwrap();
            let h = principal_generator(&i);
            let u = &g / &h;
            assert!(u.is_integral() && u.norm().abs().is_one(), "{g} vs {h}");
            assert_eq!(canonical_associate(&h), h);
        }
    }

    #[test]
    fn divisibility_and_quotient() {
        let p5 = factor_rational_prime(5).iter().find(|p| p.f == 1).unwrap().ideal.clone();
        let p7 = factor_rational_prime(7).iter().find(|p| p.f == 1).unwrap().ideal.clone();
        let n = p5.mul(&p7);
        assert!(p5.divides(&n));
        assert!(!p7.divides(&p5.mul(&p5)));
        assert_eq!(n.quotient(&p5).unwrap(), p7);
        assert_eq!(p7.quotient(&p5), Err(Error::NonIntegralQuotient));
        assert_eq!(p5.add(&p7), IdealHNF::unit());
    }

    #[test]
    fn phi_u_matches_orbit_enumeration() {
        let m = IdealHNF::from_int(4).unwrap();
        // oracle: enumerate units of O/4 and the orbit of ⟨−1, a⟩
        let mut units = 0;
        for c0 in 0..4 {
            for c1 in 0..4 {
                for c2 in 0..4 {
                    let x = fe(c0, c1, c2);
                    if x.norm().to_integer().is_odd() {
                        units += 1;
                    }
                }
            }
        }
        assert_eq!(unit_group_order(&m), BigInt::from(units));
        let mut orbit = std::collections::HashSet::new();
        let mut x = FieldElement::one();
        for _ in 0..200 {
            for s in [1, -1] {
                orbit.insert(m.reduce_vec(&to_vec(&x.scale_int(s))));
            }
            x = &x * &FieldElement::a();
        }
        assert_eq!(unit_image_order(&m), orbit.len() as u64);
        assert_eq!(phi_u(&m) * orbit.len() as u64, units as u64);
    }

    #[test]
    fn ideal_counts_agree_with_enumeration() {
        for n in [1u64, 5, 8, 25, 40, 115, 529] {
            assert_eq!(ideals_of_norm(n).len() as u64, count_ideals_of_norm(n), "{n}");
        }
    }

    #[test]
    fn parse_ideal_forms() {
        let i: IdealHNF = "(a^2-9)".parse().unwrap();
        let j: IdealHNF = i.hnf_string().parse().unwrap();
        assert_eq!(i, j);
    }
}
