use ec23::curve::Curve;
use ec23::ideal::IdealHNF;
use ec23::tate::conductor_and_minimal_model;

fn check(curve: &str, conductor: &str, norm: u64) {
    let e: Curve = curve.parse().unwrap();
    let g = conductor_and_minimal_model(&e).unwrap();
    let want: IdealHNF = conductor.parse().unwrap();
    assert_eq!(g.conductor.norm(), norm.into(), "{curve}");
    assert_eq!(g.conductor, want, "{curve}");
    assert!(g.minimal.is_isomorphic(&e).is_some());
}

#[test]
fn known_search_curves() {
    check("[a^2, a+1, a^2, -200a^2+56a+5, -739a^2+41a+1139]", "a^2-9", 665);
    check(
        "[a^2+1, -a^2+a+1, a, -249910a^2+438560a-331055, 86253321a^2-151364024a+114261323]",
        "3a^2-14a+1",
        2065,
    );
    check("[a+1, -a^2-a, a^2+a+1, -43a^2+63a-69, -198a^2+335a-288]", "14a-3", 2645);
    check("[a^2+a, -a^2-a, a^2, -212a^2+305a-181, -1422a^2+2466a-2087]", "-15a^2+8a-1", 3025);
    check("[a, -a^2-1, a^2+1, -48a^2+85a-63, -211a^2+368a-277]", "a^2-10a+1", 865);
}

#[test]
fn non_minimal_model_minimalizes() {
    let nonmin: Curve = "[16a^2+24a+10, -1872a^2-152a+952, -1872a^2-152a+952, 0, 0]".parse().unwrap();
    let listed: Curve =
        "[a^2+1, -a^2+a+1, a, -249910a^2+438560a-331055, 86253321a^2-151364024a+114261323]".parse().unwrap();
    let g = conductor_and_minimal_model(&nonmin).unwrap();
    assert_eq!(g.conductor.norm(), 2065u64.into());
    assert!(g.minimal.is_isomorphic(&listed).is_some());
    assert_eq!(g.minimal, conductor_and_minimal_model(&listed).unwrap().minimal);
}
