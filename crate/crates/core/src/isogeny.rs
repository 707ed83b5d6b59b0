//! Reducible primes after Billerey, Vélu isogenies and isogeny classes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{factor_bigint, is_prime_u64, legendre, next_prime};
use crate::curve::Curve;
use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::ideal::{factor_rational_prime, primes_up_to_norm, PrimeIdeal};
use crate::poly::zpoly::{interpolate_integer, resultant};
use crate::poly::ZPoly;
use crate::polyf::{factor_poly_over_f, roots_in_f, PolyOverF};
use crate::residue::count_points;
use crate::tate::conductor_and_minimal_model;
use crate::torsion::{division_polynomial, DivisionPolys};

/// Members of the monoid M: monic, nonzero constant term.
pub fn in_monoid(p: &ZPoly) -> bool {
    !p.is_zero() && p.is_monic() && !p.coeff(0).is_zero()
}

/// (P*Q)(X) = Res_Z(P(Z), Q(X/Z)·Z^deg Q); its roots are the products αβ.
pub fn star(p: &ZPoly, q: &ZPoly) -> ZPoly {
    let (n, m) = (p.deg(), q.deg());
    let d = n * m;
    let values: Vec<BigInt> = (0..=d)
        .map(|x| {
            let x = BigInt::from(x);
            // Σ q_i x^i Z^{m−i}
            let coeffs: Vec<BigInt> = (0..=m).map(|j| q.coeff(m - j) * x.pow((m - j) as u32)).collect();
            resultant(p, &ZPoly::new(coeffs))
        })
        .collect();
    interpolate_integer(&values)
}

/// The polynomial P^(r) whose roots are the r-th powers of the roots of P.
pub fn p_power_r(p: &ZPoly, r: usize) -> Result<ZPoly> {
    if r == 1 {
        return Ok(p.clone());
    }
    let mut psi = vec![BigInt::zero(); r + 1];
    psi[0] = -BigInt::one();
    psi[r] = BigInt::one();
    let s = star(p, &ZPoly::new(psi));
    let mut out = Vec::with_capacity(p.deg() + 1);
    for (i, c) in s.coeffs().iter().enumerate() {
        if i % r == 0 {
            out.push(c.clone());
        } else if !c.is_zero() {
            return Err(Error::NotAPolynomialInXr);
        }
    }
    Ok(ZPoly::new(out))
}

/// X² − a_q X + Norm(q).
pub fn frobenius_poly(e: &Curve, q: &PrimeIdeal) -> Result<ZPoly> {
    let r = count_points(e, q)?;
    Ok(ZPoly::new(vec![q.norm_big(), BigInt::from(-r.a_p), BigInt::one()]))
}

/// P_ℓ* = ⋆ over q | ℓ of P_q^(12 v_q(ℓ)).
pub fn p_star(e: &Curve, l: u64) -> Result<ZPoly> {
    let mut acc = ZPoly::from_i64(&[-1, 1]);
    for q in factor_rational_prime(l).iter() {
        let pq = frobenius_poly(e, q).map_err(|_| Error::BadReductionAtEll(l))?;
        acc = star(&acc, &p_power_r(&pq, 12 * q.e as usize)?);
    }
    Ok(acc)
}

/// B_ℓ = P_ℓ*(1)·P_ℓ*(ℓ¹²).
pub fn billerey_b(e: &Curve, l: u64) -> Result<BigInt> {
    let p = p_star(e, l)?;
    Ok(p.eval(&BigInt::one()) * p.eval(&BigInt::from(l).pow(12)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReduciblePrimeReport {
    pub s1: BTreeSet<u64>,
    pub b_values: BTreeMap<u64, BigInt>,
    pub s2: BTreeSet<u64>,
    pub s: BTreeSet<u64>,
    pub s_prime: BTreeSet<u64>,
    pub witnesses: BTreeMap<u64, (PrimeIdeal, ZPoly)>,
    pub gcd: BigInt,
}

fn irreducible_mod(p: &ZPoly, l: u64) -> bool {
    // monic quadratic X² + bX + c
    let b = p.coeff(1);
    let c = p.coeff(0);
    if l == 2 {
        return b.is_odd() && c.is_odd();
    }
    let disc = &b * &b - BigInt::from(4) * &c;
    let d = disc.mod_floor(&BigInt::from(l)).to_u64().unwrap();
    d != 0 && legendre(d, l) == -1
}

/// Primes ℓ for which the mod-ℓ representation may be reducible.
pub fn reducible_primes(e: &Curve) -> Result<ReduciblePrimeReport> {
    let m = conductor_and_minimal_model(e)?.minimal;
    let nd = m.discriminant().norm().to_integer().abs();
    let mut s1: BTreeSet<u64> = [2u64, 3, 23].into_iter().collect();
    for (p, _) in factor_bigint(&nd) {
        s1.insert(p.to_u64().expect("prime fits in u64"));
    }
    let mut b_values = BTreeMap::new();
    let mut g = BigInt::zero();
    let mut l = 2;
    let mut nonzero = 0;
    while nonzero < 4 && l < 2000 {
        l = next_prime(l);
        if s1.contains(&l) {
            continue;
        }
        let b = billerey_b(&m, l)?;
        b_values.insert(l, b.clone());
        if !b.is_zero() {
            g = g.gcd(&b);
            nonzero += 1;
        }
    }
    let s2: BTreeSet<u64> = if g.is_zero() {
        BTreeSet::new()
    } else {
        factor_bigint(&g).into_iter().map(|(p, _)| p.to_u64().unwrap()).collect()
    };
    let s: BTreeSet<u64> = s1.union(&s2).cloned().collect();
    let mut witnesses = BTreeMap::new();
    let mut s_prime = BTreeSet::new();
    let primes = primes_up_to_norm(2000);
    for &p in &s {
        let mut found = None;
        for q in primes.iter().filter(|q| q.p != p) {
            if let Ok(pq) = frobenius_poly(&m, q) {
                if irreducible_mod(&pq, p) {
                    found = Some((q.clone(), pq));
                    break;
                }
            }
        }
        match found {
            Some(w) => {
                witnesses.insert(p, w);
            }
            None => {
                s_prime.insert(p);
            }
        }
    }
    Ok(ReduciblePrimeReport { s1, b_values, s2, s, s_prime, witnesses, gcd: g })
}

/// Odd-degree Vélu sums from the kernel polynomial, or the 2-torsion case.
pub fn velu(e: &Curve, kernel: &PolyOverF, l: u64) -> Result<Curve> {
    let i = e.invariants();
    let f = FieldElement::from_int;
    let k = kernel.monic();
    let n = k.deg();
    let (t, w) = if l == 2 {
        if n != 1 {
            return Err(Error::InvalidKernel);
        }
        let x0 = -&k.coeff(0);
        let t = &(&(&(&f(3) * &x0) * &x0) + &(&(&i.b2 * &x0) / &f(2))) + &(&i.b4 / &f(2));
        let w = &x0 * &t;
        (t, w)
    } else {
        if 2 * n + 1 != l as usize {
            return Err(Error::InvalidKernel);
        }
        let s1 = -&k.coeff(n - 1);
        let s2 = if n >= 2 { k.coeff(n - 2) } else { FieldElement::zero() };
        let s3 = if n >= 3 { -&k.coeff(n - 3) } else { FieldElement::zero() };
        let p1 = s1.clone();
        let p2 = &(&s1 * &s1) - &(&f(2) * &s2);
        let p3 = &(&(&(&s1 * &s1) * &s1) - &(&(&f(3) * &s1) * &s2)) + &(&f(3) * &s3);
        let nn = f(n as i64);
        let t = &(&(&f(6) * &p2) + &(&i.b2 * &p1)) + &(&nn * &i.b4);
        let w = &(&(&(&f(10) * &p3) + &(&(&f(2) * &i.b2) * &p2)) + &(&(&f(3) * &i.b4) * &p1)) + &(&nn * &i.b6);
        (t, w)
    };
    let c = Curve::new(
        e.a1.clone(),
        e.a2.clone(),
        e.a3.clone(),
        &e.a4 - &(&f(5) * &t),
        &(&e.a6 - &(&i.b2 * &t)) - &(&f(7) * &w),
    );
    if c.is_singular() {
        return Err(Error::InvalidKernel);
    }
    Ok(conductor_and_minimal_model(&c)?.minimal)
}

/// a_q at the first `count` primes good for both curves and prime to ℓ.
fn traces_agree(e: &Curve, c: &Curve, l: u64, count: usize) -> bool {
    let mut seen = 0;
    for q in primes_up_to_norm(500) {
        if q.p == l {
            continue;
        }
        if let (Ok(a), Ok(b)) = (count_points(e, &q), count_points(c, &q)) {
            if a.a_p != b.a_p {
                return false;
            }
            seen += 1;
            if seen == count {
                return true;
            }
        }
    }
    seen > 0
}

/// Kernel polynomials of F-rational ℓ-isogenies, with their codomains.
pub fn kernels_and_codomains(e: &Curve, l: u64) -> Vec<(PolyOverF, Curve)> {
    let mut out = Vec::new();
    if l == 2 {
        let mut xs = roots_in_f(&division_polynomial(e, 2));
        xs.dedup();
        for x in xs {
            let k = PolyOverF::linear(&x);
            if let Ok(c) = velu(e, &k, 2) {
                out.push((k, c));
            }
        }
        return out;
    }
    let n = ((l - 1) / 2) as usize;
    let mut d = DivisionPolys::new(e);
    let (_, facs) = factor_poly_over_f(&d.f(l));
    let small: Vec<PolyOverF> = facs.into_iter().filter(|(g, _)| g.deg() <= n).map(|(g, _)| g).collect();
    // products of distinct irreducible factors with total degree n
    let mut cands = Vec::new();
    fn rec(fs: &[PolyOverF], i: usize, left: usize, acc: PolyOverF, out: &mut Vec<PolyOverF>) {
        if left == 0 {
            out.push(acc);
            return;
        }
        if i == fs.len() {
            return;
        }
        if fs[i].deg() <= left {
            rec(fs, i + 1, left - fs[i].deg(), &acc * &fs[i], out);
        }
        rec(fs, i + 1, left, acc, out);
    }
    rec(&small, 0, n, PolyOverF::one(), &mut cands);
    for k in cands {
        if let Ok(c) = velu(e, &k, l) {
            if traces_agree(e, &c, l, 3) {
                out.push((k, c));
            }
        }
    }
    out
}

pub fn kernel_polynomials(e: &Curve, l: u64) -> Vec<PolyOverF> {
    kernels_and_codomains(e, l).into_iter().map(|(k, _)| k).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsogenyClassGraph {
    pub curves: Vec<Curve>,
    /// (i, j, ℓ) with i < j.
    pub edges: Vec<(usize, usize, u64)>,
    pub label: Option<String>,
}

impl IsogenyClassGraph {
    pub fn degrees(&self) -> BTreeSet<u64> {
        self.edges.iter().map(|e| e.2).collect()
    }

    pub fn to_dot(&self) -> String {
        let name = self.label.clone().unwrap_or_else(|| "class".to_string());
        let mut s = format!("graph \"{name}\" {{\n");
        for (i, c) in self.curves.iter().enumerate() {
            let _ = writeln!(s, "  {} [label=\"{}\"];", i + 1, c);
        }
        for &(i, j, l) in &self.edges {
            let attr = match l {
                2 => "style=solid".to_string(),
                3 => "style=dashed".to_string(),
                _ => format!("label=\"{l}\""),
            };
            let _ = writeln!(s, "  {} -- {} [{}];", i + 1, j + 1, attr);
        }
        s.push_str("}\n");
        s
    }
}

pub const DEFAULT_CLASS_CAP: usize = 64;

pub fn isogeny_class(e: &Curve) -> Result<IsogenyClassGraph> {
    isogeny_class_with_cap(e, DEFAULT_CLASS_CAP)
}

/// Closure of E under F-rational isogenies of prime degree in S'.
pub fn isogeny_class_with_cap(e: &Curve, cap: usize) -> Result<IsogenyClassGraph> {
    let start = conductor_and_minimal_model(e)?.minimal;
    let report = reducible_primes(&start)?;
    let degrees: Vec<u64> = report.s_prime.iter().cloned().filter(|&l| is_prime_u64(l)).collect();
    let mut curves = vec![start];
    let mut js = vec![curves[0].j_invariant()?];
    let mut edges: BTreeSet<(usize, usize, u64)> = BTreeSet::new();
    let mut i = 0;
    while i < curves.len() {
        let c = curves[i].clone();
        for &l in &degrees {
            for (_, d) in kernels_and_codomains(&c, l) {
                let jd = d.j_invariant()?;
                let found = (0..curves.len()).find(|&k| js[k] == jd && curves[k].is_isomorphic(&d).is_some());
                let k = match found {
                    Some(k) => k,
                    None => {
                        if curves.len() == cap {
                            return Err(Error::ClassSizeLimit(cap));
                        }
                        curves.push(d);
                        js.push(jd);
                        curves.len() - 1
                    }
                };
                if k != i {
                    edges.insert((i.min(k), i.max(k), l));
                }
            }
        }
        i += 1;
    }
    // deterministic order: sort by model
    let mut idx: Vec<usize> = (0..curves.len()).collect();
    idx.sort_by(|&a, &b| curves[a].cmp(&curves[b]));
    let mut pos = vec![0; curves.len()];
    for (new, &old) in idx.iter().enumerate() {
        pos[old] = new;
    }
    let sorted: Vec<Curve> = idx.iter().map(|&k| curves[k].clone()).collect();
    let mut es: Vec<(usize, usize, u64)> = edges
        .into_iter()
        .map(|(a, b, l)| {
            let (x, y) = (pos[a], pos[b]);
            (x.min(y), x.max(y), l)
        })
        .collect();
    es.sort();
    Ok(IsogenyClassGraph { curves: sorted, edges: es, label: None })
}
