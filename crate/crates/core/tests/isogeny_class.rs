use std::collections::BTreeSet;

use num_bigint::BigInt;

use ec23::curve::Curve;
use ec23::ideal::primes_up_to_norm;
use ec23::isogeny::{frobenius_poly, isogeny_class, reducible_primes};
use ec23::poly::ZPoly;
use ec23::tate::conductor_and_minimal_model;

fn curve_385() -> Curve {
    "[a^2+1, -a^2+a-1, 0, 1, 0]".parse().unwrap()
}

fn set(xs: &[u64]) -> BTreeSet<u64> {
    xs.iter().cloned().collect()
}

#[test]
fn reducible_prime_report_385() {
    let e = curve_385();
    assert_eq!(e.discriminant().norm(), BigInt::from(-67375).into());
    let r = reducible_primes(&e).unwrap();
    assert_eq!(r.s1, set(&[2, 3, 5, 7, 11, 23]));
    assert_eq!(r.b_values.keys().cloned().collect::<BTreeSet<_>>(), set(&[13, 17, 19, 29]));
    assert_eq!(r.gcd, BigInt::from(2).pow(16) * BigInt::from(3).pow(9));
    assert_eq!(r.s2, set(&[2, 3]));
    assert_eq!(r.s, r.s1);
    assert_eq!(r.s_prime, set(&[2, 3]));
    for p in [5, 7, 11] {
        let (q, poly) = &r.witnesses[&p];
        assert_eq!(q.norm(), 8);
        assert_eq!(*poly, ZPoly::from_i64(&[8, 3, 1]));
    }
    assert!(r.witnesses.contains_key(&23));
    let p17 = primes_up_to_norm(17).into_iter().find(|q| q.norm() == 17).unwrap();
    assert_eq!(frobenius_poly(&e, &p17).unwrap(), ZPoly::from_i64(&[17, 6, 1]));
}

#[test]
fn class_385_has_twelve_curves() {
    let g = isogeny_class(&curve_385()).unwrap();
    assert_eq!(g.curves.len(), 12);
    assert_eq!(g.degrees(), set(&[2, 3]));
    let n = conductor_and_minimal_model(&curve_385()).unwrap().conductor;
    for (i, c) in g.curves.iter().enumerate() {
        assert_eq!(conductor_and_minimal_model(c).unwrap().conductor, n);
        for d in &g.curves[i + 1..] {
            assert!(c.is_isomorphic(d).is_none());
        }
    }
    // connected
    let mut seen = vec![false; g.curves.len()];
    seen[0] = true;
    let mut changed = true;
    while changed {
        changed = false;
        for &(i, j, _) in &g.edges {
            if seen[i] != seen[j] {
                seen[i] = true;
                seen[j] = true;
                changed = true;
            }
        }
    }
    assert!(seen.iter().all(|&s| s));
    let dot = g.to_dot();
    assert!(dot.contains("style=solid") && dot.contains("style=dashed"));
}

#[test]
fn singleton_and_seven_isogeny() {
    let lonely: Curve = "[1, a^2+a-1, a^2+a, -a-1, -a^2+1]".parse().unwrap();
    let g = isogeny_class(&lonely).unwrap();
    assert_eq!(g.curves.len(), 1);
    assert!(g.edges.is_empty());
    let seven: Curve = "[a, -a-1, a^2+1, 1, -a^2]".parse().unwrap();
    let g = isogeny_class(&seven).unwrap();
    assert!(g.degrees().contains(&7));
    assert!(g.to_dot().contains("label=\"7\""));
}
