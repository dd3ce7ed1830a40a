use transversal::certify::{
    certify, certify_form, certify_full_variants, certify_one_sided, certify_restricted, recheck,
    witness_reduction_equivalence, Form, Property, PropertyQuery, Restricted, RestrictedQuery,
    Status,
};
use transversal::scenes;
use transversal::Gauge;

fn lin(alpha: f64) -> Gauge {
    Gauge::linear(alpha).unwrap()
}

#[test]
fn half_plane_under_parabola_semi_with_root_gauge_holds() {
    let q = PropertyQuery::semi(Gauge::scaled_root(2f64.sqrt()).unwrap(), 2.0).with_budget(10_000);
    let v = certify(&scenes::half_plane_under_parabola(), &q).unwrap();
    assert_eq!(v.status, Status::HoldsOnSamples, "{v:?}");
}

#[test]
fn singletons_semi_is_falsified_with_witness() {
    let s = scenes::singletons();
    let q = PropertyQuery::semi(lin(1.0), 1.0).with_budget(200);
    let v = certify(&s, &q).unwrap();
    assert_eq!(v.status, Status::Falsified);
    assert!(recheck(&s, &q, v.witness.as_ref().unwrap()).unwrap());
}

#[test]
fn opposite_parabolas_sub_holds_with_root_gauge() {
    let q = PropertyQuery::sub(Gauge::scaled_root(1.1).unwrap(), 1.0, 0.1).with_budget(10_000);
    let v = certify(&scenes::opposite_parabolas(), &q).unwrap();
    assert_eq!(v.status, Status::HoldsOnSamples, "{v:?}");
}

#[test]
fn tangent_parabolas_sub_linear_is_falsified() {
    let s = scenes::tangent_parabolas();
    let q = PropertyQuery::sub(lin(0.5), 0.5, 0.5).with_budget(1000);
    let v = certify(&s, &q).unwrap();
    assert_eq!(v.status, Status::Falsified);
    assert!(recheck(&s, &q, v.witness.as_ref().unwrap()).unwrap());
}

#[test]
fn crossing_lines_full_threshold() {
    let s = scenes::crossing_lines();
    let q = PropertyQuery::full(lin(0.3), 0.1, 0.1).with_budget(4000);
    assert_eq!(certify(&s, &q).unwrap().status, Status::HoldsOnSamples);
    let q = PropertyQuery::full(lin(0.4), 0.1, 0.1).with_budget(4000);
    let v = certify(&s, &q).unwrap();
    assert_eq!(v.status, Status::Falsified);
    assert!(recheck(&s, &q, v.witness.as_ref().unwrap()).unwrap());
}

#[test]
fn interior_point_is_transversal() {
    let q = PropertyQuery::full(lin(1.0), 0.1, 0.1).with_budget(2000);
    assert_eq!(
        certify(&scenes::overlapping_balls(), &q).unwrap().status,
        Status::HoldsOnSamples
    );
}

#[test]
fn full_variants_agree() {
    let q = PropertyQuery::full(lin(0.3), 0.1, 0.2).with_budget(3000);
    let v = certify_full_variants(&scenes::crossing_lines(), &q).unwrap();
    assert_eq!(v.statuses(), [Status::HoldsOnSamples; 3]);
    let q = PropertyQuery::full(lin(0.5), 0.5, 0.5).with_budget(3000);
    let v = certify_full_variants(&scenes::tangent_parabolas(), &q).unwrap();
    assert_eq!(v.statuses(), [Status::Falsified; 3], "{v:?}");
}

#[test]
fn restricted_crossing_lines_semi() {
    let rq = RestrictedQuery::linear(Restricted::Semi, 1.0, 0.1)
        .unwrap()
        .with_budget(3000);
    let r = certify_restricted(&scenes::crossing_lines(), &rq).unwrap();
    assert_eq!(r.premise.status, Status::HoldsOnSamples);
    assert!((r.implied.alpha_prime - 1.0 / 3.0).abs() < 1e-15);
    assert_eq!(r.conclusion.unwrap().status, Status::HoldsOnSamples);
    assert!(r.consistent);
}

#[test]
fn restricted_identical_half_planes_sub() {
    let rq = RestrictedQuery::linear(Restricted::Sub, 1.0, 0.1)
        .unwrap()
        .with_delta2(0.1)
        .with_budget(2000);
    let r = certify_restricted(&scenes::identical_half_planes(), &rq).unwrap();
    assert_eq!(r.premise.status, Status::HoldsOnSamples, "{:?}", r.premise);
    assert_eq!(r.conclusion.unwrap().status, Status::HoldsOnSamples);
}

#[test]
fn restricted_tangent_parabolas_sub_fails() {
    let rq = RestrictedQuery::linear(Restricted::Sub, 1.0, 0.1)
        .unwrap()
        .with_delta2(0.1)
        .with_budget(2000);
    let r = certify_restricted(&scenes::tangent_parabolas(), &rq).unwrap();
    assert_eq!(r.premise.status, Status::Falsified);
    assert!(r.conclusion.is_none());
}

#[test]
fn one_sided_checks_catch_tangency() {
    let s = scenes::tangent_parabolas();
    for p in [Property::Semi, Property::Sub, Property::Full] {
        let q = PropertyQuery::new(p, lin(0.5), 0.5, 0.5).with_budget(2000);
        assert_eq!(
            certify_one_sided(&s, &q).unwrap().status,
            Status::Falsified,
            "{p:?}"
        );
    }
}

#[test]
fn reduction_equivalence_examples() {
    let r = witness_reduction_equivalence(
        &scenes::opposite_parabolas(),
        &[0.0, 0.25],
        &Gauge::scaled_root(1.1).unwrap(),
        500,
        1,
    )
    .unwrap();
    assert!(r.agree && r.direct == Some(true), "{r:?}");
    let r =
        witness_reduction_equivalence(&scenes::tangent_parabolas(), &[0.1, 0.0], &lin(1.0), 500, 1)
            .unwrap();
    assert!(r.agree && r.direct == Some(false), "{r:?}");
}

#[test]
fn anchored_sub_matches_direct_form() {
    let s = scenes::tangent_parabolas();
    let q = PropertyQuery::sub(lin(0.5), 0.5, 0.5).with_budget(2000);
    assert_eq!(
        certify_form(&s, Form::SubAnchored, &q).unwrap().status,
        Status::Falsified
    );
    let q = PropertyQuery::sub(lin(1.0), 1.0, 1.0).with_budget(2000);
    assert_eq!(
        certify_form(&scenes::axes(), Form::SubAnchored, &q)
            .unwrap()
            .status,
        Status::HoldsOnSamples
    );
}
