use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use proptest::prelude::*;

use ec23::curve::Curve;
use ec23::field::FieldElement;
use ec23::ideal::{factor_ideal, ideal_from_factorization, primes_up_to_norm, IdealHNF};
use ec23::isogeny::{in_monoid, p_power_r, star};
use ec23::point::Point;
use ec23::poly::ZPoly;
use ec23::residue::count_points;
use ec23::search::{family_point_order, tate_normal_curve, FAMILIES};
use ec23::torsion::DivisionPolys;
use ec23::polyf::roots_in_f;

fn rational() -> impl Strategy<Value = BigRational> {
    (-60i64..60, 1i64..6).prop_map(|(n, d)| BigRational::new(n.into(), d.into()))
}

fn element() -> impl Strategy<Value = FieldElement> {
    (rational(), rational(), rational()).prop_map(|(x, y, z)| FieldElement::new(x, y, z))
}

fn integral() -> impl Strategy<Value = FieldElement> {
    (-30i64..30, -30i64..30, -30i64..30).prop_map(|(x, y, z)| FieldElement::from_ints(x, y, z))
}

fn nonzero_integral() -> impl Strategy<Value = FieldElement> {
    integral().prop_filter("nonzero", |x| !x.is_zero())
}

fn small_curve() -> impl Strategy<Value = Curve> {
    let c = || (-3i64..4, -3i64..4, -3i64..4).prop_map(|(x, y, z)| FieldElement::from_ints(x, y, z));
    (c(), c(), c(), c(), c())
        .prop_map(|(a1, a2, a3, a4, a6)| Curve::new(a1, a2, a3, a4, a6))
        .prop_filter("nonsingular", |e| !e.is_singular())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn field_axioms(x in element(), y in element(), z in element()) {
        prop_assert_eq!(&(&x + &y) + &z, &x + &(&y + &z));
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
        prop_assert_eq!(&x * &y, &y * &x);
        prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
        prop_assert_eq!(&x - &x, FieldElement::zero());
        prop_assert_eq!((&x * &y).norm(), x.norm() * y.norm());
        prop_assert_eq!((&x + &y).trace(), x.trace() + y.trace());
        if !x.is_zero() {
            prop_assert!((&x * &x.inv()).is_one());
        }
    }

    #[test]
    fn ideal_axioms(x in nonzero_integral(), y in nonzero_integral()) {
        let (i, j) = (IdealHNF::principal(&x).unwrap(), IdealHNF::principal(&y).unwrap());
        prop_assert_eq!(i.norm(), x.norm().abs().to_integer());
        let ij = i.mul(&j);
        prop_assert_eq!(ij.norm(), i.norm() * j.norm());
        prop_assert_eq!(&ij, &IdealHNF::principal(&(&x * &y)).unwrap());
        prop_assert!(i.divides(&ij) && j.divides(&ij));
        let s = i.add(&j);
        prop_assert!(s.divides(&i) && s.divides(&j));
        prop_assert_eq!(ij.quotient(&i).unwrap(), j.clone());
        if i.norm() < BigInt::from(1_000_000) {
            prop_assert_eq!(ideal_from_factorization(&factor_ideal(&i)), i);
        }
    }
}

#[test]
fn field_discriminant() {
    let basis = [FieldElement::one(), FieldElement::a(), &FieldElement::a() * &FieldElement::a()];
    let m: Vec<Vec<BigRational>> = basis.iter().map(|x| basis.iter().map(|y| (x * y).trace()).collect()).collect();
    let det = &m[0][0] * (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1]) - &m[0][1] * (&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0])
        + &m[0][2] * (&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0]);
    assert_eq!(det, BigRational::from_integer((-23).into()));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn invariants_and_hasse(e in small_curve()) {
        let inv = e.invariants();
        let c4 = &inv.c4;
        let lhs = &(&(c4 * c4) * c4) - &(&inv.c6 * &inv.c6);
        prop_assert_eq!(lhs, &FieldElement::from_int(1728) * &inv.disc);
        for p in primes_up_to_norm(60) {
            if let Ok(r) = count_points(&e, &p) {
                let q = p.norm() as i64;
                prop_assert!(r.a_p * r.a_p <= 4 * q, "a_p = {} at norm {}", r.a_p, q);
            }
        }
    }
}

fn monoid_poly() -> impl Strategy<Value = ZPoly> {
    prop::collection::vec(-6i64..7, 1..4)
        .prop_filter("nonzero constant", |c| c[0] != 0)
        .prop_map(|mut c| {
            c.push(1);
            ZPoly::from_i64(&c)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn monoid_laws(p in monoid_poly(), q in monoid_poly(), r in monoid_poly()) {
        let one = ZPoly::from_i64(&[-1, 1]);
        prop_assert_eq!(star(&p, &one), p.clone());
        let pq = star(&p, &q);
        prop_assert!(in_monoid(&pq));
        prop_assert_eq!(pq.deg(), p.deg() * q.deg());
        prop_assert_eq!(&pq, &star(&q, &p));
        prop_assert_eq!(star(&pq, &r), star(&p, &star(&q, &r)));
        // product of roots: (Π α)^deg q (Π β)^deg p
        let prod = |f: &ZPoly| if f.deg().is_multiple_of(2) { f.coeff(0) } else { -f.coeff(0) };
        prop_assert_eq!(prod(&pq), prod(&p).pow(q.deg() as u32) * prod(&q).pow(p.deg() as u32));
        // roots of p^(2) are squares
        let p2 = p_power_r(&p, 2).unwrap();
        prop_assert_eq!(p2.deg(), p.deg());
        prop_assert_eq!(prod(&p2), prod(&p).pow(2));
        prop_assert_eq!(p_power_r(&pq, 2).unwrap(), star(&p2, &p_power_r(&q, 2).unwrap()));
        // distributes over ordinary products
        prop_assert_eq!(star(&p, &(&q * &r)), &star(&p, &q) * &star(&p, &r));
    }
}

fn family_params() -> impl Strategy<Value = FieldElement> {
    (-4i64..5, -4i64..5, -3i64..4, 1i64..4).prop_map(|(x, y, z, d)| {
        FieldElement::new(BigRational::new(x.into(), d.into()), BigRational::from_integer(y.into()), BigRational::from_integer(z.into()))
    })
}

fn check_family(family: &str, t: &FieldElement) -> Result<(), TestCaseError> {
    let Ok(e) = tate_normal_curve(family, std::slice::from_ref(t)) else {
        return Err(TestCaseError::reject("singular parameter"));
    };
    let n = family_point_order(family).unwrap();
    let p = Point::new(FieldElement::zero(), FieldElement::zero());
    prop_assert!(e.is_on_curve(&p));
    prop_assert_eq!(e.point_order(&p, n + 1), Some(n));
    if family.starts_with("Z2 x") {
        let d = DivisionPolys::new(&e);
        let roots = roots_in_f(d.psi2_squared());
        prop_assert_eq!(roots.len(), 3, "full 2-torsion for {}", family);
    }
    Ok(())
}

macro_rules! family_test {
    ($name:ident, $label:expr) => {
        proptest! {
            #![proptest_config(ProptestConfig::with_cases(50))]
            #[test]
            fn $name(t in family_params()) {
                check_family($label, &t)?;
            }
        }
    };
}

family_test!(family_z4, "Z4");
family_test!(family_z5, "Z5");
family_test!(family_z6, "Z6");
family_test!(family_z7, "Z7");
family_test!(family_z8, "Z8");
family_test!(family_z9, "Z9");
family_test!(family_z10, "Z10");
family_test!(family_z12, "Z12");
family_test!(family_z2_z4, "Z2 x Z4");
family_test!(family_z2_z6, "Z2 x Z6");
family_test!(family_z2_z8, "Z2 x Z8");

#[test]
fn every_family_is_covered() {
    let tested = ["Z4", "Z5", "Z6", "Z7", "Z8", "Z9", "Z10", "Z12", "Z2 x Z4", "Z2 x Z6", "Z2 x Z8"];
    assert_eq!(FAMILIES.to_vec(), tested.to_vec());
}
