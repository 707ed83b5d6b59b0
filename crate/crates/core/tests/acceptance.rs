//! One line per acceptance criterion. Exits nonzero if any criterion fails.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

use ec23::curve::Curve;
use ec23::dataset::{CurveRecord, Dataset};
use ec23::field::FieldElement;
use ec23::ideal::{divisors, factor_rational_prime, phi_u, primes_up_to_norm, IdealHNF};
use ec23::isogeny::{frobenius_poly, in_monoid, isogeny_class, p_power_r, reducible_primes, star};
use ec23::ledger::{cusp_count, ingest_dims, newspace_ledger, LevelRecord};
use ec23::point::Point;
use ec23::poly::ZPoly;
use ec23::polyf::roots_in_f;
use ec23::residue::count_points;
use ec23::search::{
    family_point_order, prescribed_reduction_search, quadratic_twist, tate_normal_curve, twist_candidates, DEFAULT_EFFORT,
    FAMILIES,
};
use ec23::tate::conductor_and_minimal_model;
use ec23::torsion::{torsion_subgroup, DivisionPolys};

type Check = std::result::Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn curve(s: &str) -> Curve {
    s.parse().unwrap()
}

fn ideal(s: &str) -> IdealHNF {
    s.parse().unwrap()
}

fn degree_one(p: u64) -> IdealHNF {
    factor_rational_prime(p).iter().find(|q| q.norm() == p).unwrap().ideal.clone()
}

fn c1_class_385() -> Check {
    let e = curve("[a^2+1, -a^2+a-1, 0, 1, 0]");
    let disc = e.discriminant();
    ensure!(disc == "12a^2-25a-43".parse().unwrap(), "discriminant {disc}");
    ensure!(disc.norm() == BigRational::from_integer((-67375).into()), "norm {}", disc.norm());
    let r = reducible_primes(&e).map_err(|x| x.to_string())?;
    ensure!(r.s1 == [2, 3, 5, 7, 11, 23].into_iter().collect(), "S1 = {:?}", r.s1);
    ensure!(r.gcd == BigInt::from(2).pow(16) * BigInt::from(3).pow(9), "gcd = {}", r.gcd);
    let p2 = &factor_rational_prime(2)[0];
    ensure!(frobenius_poly(&e, p2).unwrap() == ZPoly::from_i64(&[8, 3, 1]), "P at p2");
    let p17 = primes_up_to_norm(17).into_iter().find(|q| q.norm() == 17).unwrap();
    ensure!(frobenius_poly(&e, &p17).unwrap() == ZPoly::from_i64(&[17, 6, 1]), "P at p17");
    for l in [5, 7, 11] {
        let (q, poly) = &r.witnesses[&l];
        ensure!(q.norm() == 8 && *poly == ZPoly::from_i64(&[8, 3, 1]), "witness for {l}");
    }
    ensure!(r.s_prime.iter().all(|l| [2, 3].contains(l)), "S' = {:?}", r.s_prime);
    let g = isogeny_class(&e).map_err(|x| x.to_string())?;
    ensure!(g.curves.len() == 12, "class size {}", g.curves.len());
    ensure!(g.degrees() == [2, 3].into_iter().collect(), "degrees {:?}", g.degrees());
    for (i, c) in g.curves.iter().enumerate() {
        let n = conductor_and_minimal_model(c).unwrap().conductor.norm();
        ensure!(n == BigInt::from(385), "conductor norm {n}");
        ensure!(g.curves[i + 1..].iter().all(|d| d.is_isomorphic(c).is_none()), "isomorphic members");
    }
    Ok("12 curves, degrees {2,3}, gcd 2^16*3^9".into())
}

fn c2_level_p5_p7_p37() -> Check {
    let (p5, p7, p37) = (degree_one(5), degree_one(7), degree_one(37));
    let big = p5.mul(&p7).mul(&p37);
    let phis: Vec<u64> = divisors(&big).iter().map(|d| phi_u(&d.add(&big.quotient(d).unwrap()))).collect();
    ensure!(phis == vec![1; 8], "phi_u values {phis:?}");
    ensure!(cusp_count(&big) == 8, "c(N) = {}", cusp_count(&big));
    let rec = LevelRecord::new(big.clone(), Some(19));
    ensure!(rec.eis_rank == 15 && rec.cusp_dim == Some(4), "eis {} cusp {:?}", rec.eis_rank, rec.cusp_dim);
    let mut text = String::new();
    for d in divisors(&big) {
        let cusp = if d == big {
            4
        } else if d == p5.mul(&p7) || d == p5.mul(&p37) {
            1
        } else {
            0
        };
        text += &format!("{}\t{}\t{}\n", d.generator_string(), d.norm(), 2 * cusp_count(&d) as i64 - 1 + cusp);
    }
    let ledger = newspace_ledger(&ingest_dims(&text).map_err(|x| x.to_string())?);
    ensure!(ledger.new_dim[&big] == 0, "new_dim(N) = {}", ledger.new_dim[&big]);
    Ok("c = 8, eis 15, cusp 4, new 0".into())
}

fn c3_conductors() -> Check {
    let rows = [
        ("[a^2, a+1, a^2, -200a^2+56a+5, -739a^2+41a+1139]", "a^2-9", 665),
        ("[16a^2+24a+10, -1872a^2-152a+952, -1872a^2-152a+952, 0, 0]", "3a^2-14a+1", 2065),
        ("[a^2+1, -a^2+a+1, a, -249910a^2+438560a-331055, 86253321a^2-151364024a+114261323]", "3a^2-14a+1", 2065),
        ("[a+1, -a^2-a, a^2+a+1, -43a^2+63a-69, -198a^2+335a-288]", "14a-3", 2645),
        ("[a^2+a, -a^2-a, a^2, -212a^2+305a-181, -1422a^2+2466a-2087]", "-15a^2+8a-1", 3025),
        ("[a, -a^2-1, a^2+1, -48a^2+85a-63, -211a^2+368a-277]", "a^2-10a+1", 865),
    ];
    for (c, n, norm) in rows {
        let g = conductor_and_minimal_model(&curve(c)).map_err(|x| x.to_string())?;
        ensure!(g.conductor == ideal(n), "{c}: conductor {}", g.conductor);
        ensure!(g.conductor.norm() == BigInt::from(norm), "{c}: norm");
    }
    let nonmin = conductor_and_minimal_model(&curve(rows[1].0)).unwrap().minimal;
    ensure!(nonmin.is_isomorphic(&curve(rows[2].0)).is_some(), "non-minimal model does not minimalize to the listed curve");
    Ok("665, 2065 (and a non-minimal model), 2645, 3025, 865".into())
}

fn c4_torsion() -> Check {
    let rows = [
        ("[-a^2+a, -a^2+a-1, -1, 0, 0]", "0"),
        ("[0, a^2+1, 0, a^2, 0]", "Z2 x Z4"),
        ("[-1, a^2-a, a, 1, 0]", "Z5"),
        ("[a, 1, a, 0, 0]", "Z8"),
        ("[a, a+1, a, 6a-5, 4a^2-7a+2]", "Z2 x Z6"),
        ("[a^2, -a^2-a-1, a^2+1, -4a^2+11a-5, 6a^2-15a+11]", "Z2 x Z12"),
    ];
    for (c, want) in rows {
        let t = torsion_subgroup(&curve(c)).map_err(|x| x.to_string())?;
        ensure!(t.label() == want, "{c}: {} instead of {want}", t.label());
    }
    Ok("six rows".into())
}

fn c5_twists() -> Check {
    let cases = [
        ("[a, a+1, a, 6a-5, 4a^2-7a+2]", "[a+1, -a^2-a, a^2+a+1, -43a^2+63a-69, -198a^2+335a-288]", 2645),
        ("[4a^2+3a+1, 4a^2+3a, 4a^2+3a, 0, 0]", "[a^2+a, -a^2-a, a^2, -212a^2+305a-181, -1422a^2+2466a-2087]", 3025),
    ];
    let mut used = Vec::new();
    for (base, target, norm) in cases {
        let (e, t) = (curve(base), curve(target));
        let ds = twist_candidates(&e, norm).map_err(|x| x.to_string())?;
        let d = ds.iter().find(|d| quadratic_twist(&e, d).map(|x| x.is_isomorphic(&t).is_some()).unwrap_or(false));
        ensure!(d.is_some(), "no twist of {base} among {} candidates reaches norm {norm}", ds.len());
        used.push(format!("{norm} via d = {}", d.unwrap()));
    }
    Ok(used.join(", "))
}

fn c6_prescribed() -> Check {
    let target = curve("[a, -a^2-1, a^2+1, -48a^2+85a-63, -211a^2+368a-277]");
    let found = prescribed_reduction_search(&ideal("a^2-10a+1"), DEFAULT_EFFORT).map_err(|x| x.to_string())?;
    ensure!(found.iter().any(|c| c.is_isomorphic(&target).is_some()), "not found; {} curves of conductor norm 865 found", found.len());
    Ok(format!("{} curves of conductor norm 865 found", found.len()))
}

fn run_prop<S: Strategy>(cases: u32, s: S, f: impl Fn(S::Value) -> std::result::Result<(), TestCaseError>) -> Check
where
    S::Value: std::fmt::Debug,
{
    let mut runner = TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() });
    runner.run(&s, f).map(|_| String::new()).map_err(|e| e.to_string())
}

fn rational() -> impl Strategy<Value = BigRational> {
    (-60i64..60, 1i64..6).prop_map(|(n, d)| BigRational::new(n.into(), d.into()))
}

fn element() -> impl Strategy<Value = FieldElement> {
    (rational(), rational(), rational()).prop_map(|(x, y, z)| FieldElement::new(x, y, z))
}

fn nonzero_integral() -> impl Strategy<Value = FieldElement> {
    (-30i64..30, -30i64..30, -30i64..30)
        .prop_map(|(x, y, z)| FieldElement::from_ints(x, y, z))
        .prop_filter("nonzero", |x| !x.is_zero())
}

fn small_curve() -> impl Strategy<Value = Curve> {
    let c = || (-3i64..4, -3i64..4, -3i64..4).prop_map(|(x, y, z)| FieldElement::from_ints(x, y, z));
    (c(), c(), c(), c(), c())
        .prop_map(|(a1, a2, a3, a4, a6)| Curve::new(a1, a2, a3, a4, a6))
        .prop_filter("nonsingular", |e| !e.is_singular())
}

fn monoid_poly() -> impl Strategy<Value = ZPoly> {
    prop::collection::vec(-6i64..7, 1..4).prop_filter("nonzero constant", |c| c[0] != 0).prop_map(|mut c| {
        c.push(1);
        ZPoly::from_i64(&c)
    })
}

fn c7_properties() -> Check {
    let mut parts = Vec::new();
    run_prop(500, (element(), element(), element()), |(x, y, z)| {
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
        prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
        prop_assert_eq!((&x * &y).norm(), x.norm() * y.norm());
        if !x.is_zero() {
            prop_assert!((&x * &x.inv()).is_one());
        }
        Ok(())
    })
    .map_err(|e| format!("field axioms: {e}"))?;
    run_prop(500, (nonzero_integral(), nonzero_integral()), |(x, y)| {
        let (i, j) = (IdealHNF::principal(&x).unwrap(), IdealHNF::principal(&y).unwrap());
        prop_assert_eq!(i.norm(), x.norm().abs().to_integer());
        prop_assert_eq!(i.mul(&j).norm(), i.norm() * j.norm());
        prop_assert_eq!(i.mul(&j), IdealHNF::principal(&(&x * &y)).unwrap());
        Ok(())
    })
    .map_err(|e| format!("ideal axioms: {e}"))?;
    parts.push("500 field + 500 ideal cases");

    let basis = [FieldElement::one(), FieldElement::a(), &FieldElement::a() * &FieldElement::a()];
    let m: Vec<Vec<BigRational>> = basis.iter().map(|x| basis.iter().map(|y| (x * y).trace()).collect()).collect();
    let det = &m[0][0] * (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1]) - &m[0][1] * (&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0])
        + &m[0][2] * (&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0]);
    ensure!(det == BigRational::from_integer((-23).into()), "disc(F) = {det}");
    parts.push("disc -23");

    run_prop(60, small_curve(), |e| {
        let inv = e.invariants();
        let lhs = &(&(&inv.c4 * &inv.c4) * &inv.c4) - &(&inv.c6 * &inv.c6);
        prop_assert_eq!(lhs, &FieldElement::from_int(1728) * &inv.disc);
        for p in primes_up_to_norm(60) {
            if let Ok(r) = count_points(&e, &p) {
                prop_assert!(r.a_p * r.a_p <= 4 * p.norm() as i64);
            }
        }
        Ok(())
    })
    .map_err(|e| format!("Hasse / c4^3 - c6^2: {e}"))?;
    parts.push("Hasse and 1728 disc");

    run_prop(200, (monoid_poly(), monoid_poly(), monoid_poly()), |(p, q, r)| {
        let pq = star(&p, &q);
        prop_assert!(in_monoid(&pq));
        prop_assert_eq!(pq.deg(), p.deg() * q.deg());
        prop_assert_eq!(&pq, &star(&q, &p));
        prop_assert_eq!(star(&pq, &r), star(&p, &star(&q, &r)));
        prop_assert_eq!(star(&p, &ZPoly::from_i64(&[-1, 1])), p.clone());
        let prod = |f: &ZPoly| if f.deg().is_multiple_of(2) { f.coeff(0) } else { -f.coeff(0) };
        prop_assert_eq!(prod(&pq), prod(&p).pow(q.deg() as u32) * prod(&q).pow(p.deg() as u32));
        prop_assert_eq!(prod(&p_power_r(&p, 2).unwrap()), prod(&p).pow(2));
        Ok(())
    })
    .map_err(|e| format!("monoid: {e}"))?;
    parts.push("200 monoid cases");

    let params = (-4i64..5, -4i64..5, -3i64..4, 1i64..4)
        .prop_map(|(x, y, z, d)| FieldElement::new(BigRational::new(x.into(), d.into()), BigRational::from_integer(y.into()), BigRational::from_integer(z.into())));
    for fam in FAMILIES {
        run_prop(50, params.clone(), |t| {
            let Ok(e) = tate_normal_curve(fam, std::slice::from_ref(&t)) else {
                return Err(TestCaseError::reject("singular"));
            };
            let n = family_point_order(fam).unwrap();
            prop_assert_eq!(e.point_order(&Point::new(FieldElement::zero(), FieldElement::zero()), n + 1), Some(n));
            if fam.starts_with("Z2 x") {
                prop_assert_eq!(roots_in_f(DivisionPolys::new(&e).psi2_squared()).len(), 3);
            }
            Ok(())
        })
        .map_err(|e| format!("family {fam}: {e}"))?;
    }
    parts.push("50 cases per family");

    let ds = Dataset::from_curves(&[curve("[a^2+1, -a^2+a-1, 0, 1, 0]")]).map_err(|x| x.to_string())?;
    let records: Vec<CurveRecord> = ds.records.clone();
    run_prop(64, prop::sample::subsequence(records, 0..=12), |rs| {
        let labels: BTreeSet<String> = rs.iter().map(|r| r.label.clone()).collect();
        let sub = Dataset {
            edges: ds.edges.iter().filter(|e| labels.contains(&e.0) && labels.contains(&e.1)).cloned().collect(),
            records: rs,
            xrefs: Default::default(),
        };
        prop_assert_eq!(Dataset::from_tsv(&sub.to_tsv()).unwrap(), sub);
        Ok(())
    })
    .map_err(|e| format!("dataset round trip: {e}"))?;
    parts.push("dataset round trip");
    Ok(parts.join(", "))
}

fn main() {
    let criteria: [(&str, fn() -> Check, Duration); 7] = [
        ("norm-385 curve end-to-end", c1_class_385, Duration::from_secs(300)),
        ("ledger at p5*p7*p37", c2_level_p5_p7_p37, Duration::from_secs(10)),
        ("conductors of known search curves", c3_conductors, Duration::from_secs(120)),
        ("torsion table rows", c4_torsion, Duration::MAX),
        ("twist recovery", c5_twists, Duration::MAX),
        ("prescribed-reduction search, norm 865", c6_prescribed, Duration::from_secs(1800)),
        ("property suites", c7_properties, Duration::MAX),
    ];
    let mut failed = 0;
    for (i, (name, f, limit)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let r = f();
        let el = t.elapsed();
        let r = match r {
            Ok(msg) if el > *limit => Err(format!("{msg}; took {el:.1?}, limit {limit:.0?}")),
            r => r,
        };
        match r {
            Ok(msg) => println!("criterion {}: PASS  {name} ({msg}) [{el:.1?}]", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {msg} [{el:.1?}]", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
