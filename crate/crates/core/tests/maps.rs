use std::path::Path;

use proptest::prelude::*;
use transversal::certify::{
    certify, certify_full, ModulusOptions, Property, PropertyQuery, Status,
};
use transversal::maps::{
    certify_mapping, certify_regular, certify_semiregular, certify_subregular,
    estimate_mapping_modulus, graph_sets, holder_modulus_sandwich, holder_translation,
    implied_by_regularity, mapping_to_set_transversality, product_mapping, recheck_mapping,
    regularity_gauge, regularity_to_transversality_deltas, sets_to_mapping_deltas,
    transfer_regularity_to_transversality, transfer_sets_to_mapping,
    transfer_transversality_to_regularity, transversality_gauge,
    transversality_to_regularity_deltas, FnKind, GraphPoint, MappingOracle, MappingSpec, TargetSet,
};
use transversal::{scenes, Error, Gauge, SetOracle};

fn lin(alpha: f64) -> Gauge {
    Gauge::linear(alpha).unwrap()
}

fn cube_root() -> Gauge {
    Gauge::power(1.0, 1.0 / 3.0).unwrap()
}

fn func(kind: FnKind) -> (MappingOracle, GraphPoint) {
    let f = MappingOracle::single_valued(kind);
    let b = f.default_base();
    (f, b)
}

fn holds(status: Status) -> bool {
    status == Status::HoldsOnSamples
}

/// `sup |x − ∛y| / |y − x³|^{1/3}` over a grid: the sharp constant of the
/// regularity of the cube with a cube-root gauge.
fn cube_regularity_constant() -> f64 {
    let n = 400;
    let mut best: f64 = 0.0;
    for i in 1..=n {
        let x = i as f64 / n as f64;
        for j in -n..=n {
            let y = j as f64 / n as f64;
            let rhs = (y - x * x * x).abs().cbrt();
            if rhs > 0.0 {
                best = best.max((x - y.cbrt()).abs() / rhs);
            }
        }
    }
    best
}

#[test]
fn cube_regularity_constant_is_two_to_two_thirds() {
    let c = cube_regularity_constant();
    assert!((c - 2f64.powf(2.0 / 3.0)).abs() < 1e-3, "{c}");
}

#[test]
fn cube_semi_and_sub_hold_with_cube_root_gauge() {
    let (f, b) = func(FnKind::Cubic);
    let v = certify_semiregular(
        &f,
        &b,
        &PropertyQuery::semi(cube_root(), 1.0).with_budget(4000),
    )
    .unwrap();
    assert!(holds(v.status), "{v:?}");
    assert!(v.min_margin > -1e-9);
    let v = certify_subregular(
        &f,
        &b,
        &PropertyQuery::sub(cube_root(), 1.0, 1.0).with_budget(4000),
    )
    .unwrap();
    assert!(holds(v.status), "{v:?}");
}

#[test]
fn cube_regularity_needs_the_sharp_constant() {
    let (f, b) = func(FnKind::Cubic);
    let q = PropertyQuery::full(cube_root(), 1.0, 0.5).with_budget(4000);
    let v = certify_mapping(&f, &b, &q).unwrap();
    assert_eq!(v.status, Status::Falsified, "{v:?}");
    assert!(recheck_mapping(&f, &b, &q, v.witness.as_ref().unwrap()).unwrap());
    let sharp = Gauge::scaled_power(2f64.powf(2.0 / 3.0) * 1.001, 1.0 / 3.0).unwrap();
    let v = certify_mapping(
        &f,
        &b,
        &PropertyQuery::full(sharp, 1.0, 0.5).with_budget(4000),
    )
    .unwrap();
    assert!(holds(v.status), "{v:?}");
}

#[test]
fn square_is_not_semiregular() {
    let (f, b) = func(FnKind::Square);
    let q = PropertyQuery::semi(lin(1.0), 1.0).with_budget(500);
    let v = certify_semiregular(&f, &b, &q).unwrap();
    assert_eq!(v.status, Status::Falsified);
    let w = v.witness.as_ref().unwrap();
    assert!(recheck_mapping(&f, &b, &q, w).unwrap());
    // Negative values have no preimage at all.
    let (lo, _) = f.preimage_bounds(&b.x, &[vec![-0.01]], 0).unwrap();
    assert_eq!(lo, f64::INFINITY);
    let mut neg = w.clone();
    neg.raw.shifts = vec![vec![-0.01]];
    assert!(recheck_mapping(&f, &b, &q, &neg).unwrap());
}

#[test]
fn square_is_not_linearly_subregular() {
    let (f, b) = func(FnKind::Square);
    let q = PropertyQuery::sub(lin(1.0), 1.0, 1.0).with_budget(2000);
    let v = certify_subregular(&f, &b, &q).unwrap();
    assert_eq!(v.status, Status::Falsified);
    assert!(recheck_mapping(&f, &b, &q, v.witness.as_ref().unwrap()).unwrap());
}

#[test]
fn identity_is_linearly_regular_with_zero_margin() {
    let (f, b) = func(FnKind::Identity);
    for q in [
        PropertyQuery::semi(lin(1.0), 1.0),
        PropertyQuery::sub(lin(1.0), 1.0, 1.0),
        PropertyQuery::full(lin(1.0), 1.0, 1.0),
    ] {
        let v = certify_mapping(&f, &b, &q.with_budget(2000)).unwrap();
        assert!(holds(v.status), "{v:?}");
        assert!(v.min_margin.abs() < 1e-9, "{}", v.min_margin);
    }
    let v = certify_mapping(
        &f,
        &b,
        &PropertyQuery::full(lin(1.05), 1.0, 1.0).with_budget(2000),
    )
    .unwrap();
    assert_eq!(v.status, Status::Falsified);
}

#[test]
fn product_of_translates_distances() {
    let (f, b) = product_mapping(&scenes::axes()).unwrap();
    assert_eq!(b.x, vec![0.0, 0.0]);
    assert_eq!(b.y, vec![vec![0.0, 0.0]; 2]);
    f.check_base(&b).unwrap();
    let (lo, hi) = f.image_bounds(&[1.0, 1.0], &b.y, 0);
    assert!(
        (lo - 1.0).abs() < 1e-12 && (hi - 1.0).abs() < 1e-12,
        "{lo} {hi}"
    );
    let (lo, hi) = f.preimage_bounds(&[0.5, -0.25], &b.y, 0).unwrap();
    assert!((lo - 0.5).abs() < 1e-12 && (hi - 0.5).abs() < 1e-12);
}

#[test]
fn product_preimage_is_the_shifted_intersection() {
    let (f, b) = product_mapping(&scenes::half_plane_under_parabola()).unwrap();
    let y = vec![vec![0.0, 0.3], vec![0.0, -0.3]];
    let (lo, hi) = f.preimage_bounds(&b.x, &y, 0).unwrap();
    assert!(lo <= hi + 1e-12);
    assert!(hi <= (2.0f64 * 0.3).sqrt() + 1e-9, "{hi}");
}

#[test]
fn graph_sets_of_the_cube() {
    let (f, b) = func(FnKind::Cubic);
    let s = graph_sets(&f, &b).unwrap();
    assert_eq!(s.sets.len(), 2);
    assert!(s.sets[0].dist(&[2.0, 8.0], s.norm).unwrap() < 1e-12);
    assert!((s.sets[1].dist(&[5.0, 0.5], s.norm).unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn sets_and_product_mapping_agree() {
    let cases = [
        (
            scenes::axes(),
            PropertyQuery::sub(lin(1.0), 0.5, 0.5),
            Status::HoldsOnSamples,
        ),
        (
            scenes::tangent_parabolas(),
            PropertyQuery::sub(lin(0.5), 0.5, 0.5),
            Status::Falsified,
        ),
        (
            scenes::half_plane_under_parabola(),
            PropertyQuery::semi(Gauge::scaled_root(2f64.sqrt()).unwrap(), 2.0),
            Status::HoldsOnSamples,
        ),
        (
            scenes::singletons(),
            PropertyQuery::semi(lin(1.0), 1.0),
            Status::Falsified,
        ),
    ];
    for (scene, q, expected) in cases {
        let r = transfer_sets_to_mapping(&scene, &q.with_budget(2000)).unwrap();
        assert_eq!(r.set_side.status, expected, "{r:?}");
        assert!(r.agree, "{r:?}");
        assert_eq!(r.witnesses_convert, Some(true), "{r:?}");
    }
}

#[test]
fn crossing_lines_full_transfers() {
    let scene = scenes::crossing_lines();
    let q = PropertyQuery::full(lin(0.3), 0.1, 0.1).with_budget(4000);
    let r = transfer_sets_to_mapping(&scene, &q).unwrap();
    assert!(holds(certify_full(&scene, &q).unwrap().status));
    assert!(holds(r.set_side.status));
    assert!(holds(r.map_side.status), "{r:?}");
    assert!(r.agree && r.witnesses_convert.is_none());
    let q = PropertyQuery::full(lin(0.4), 0.1, 0.1).with_budget(4000);
    let r = transfer_sets_to_mapping(&scene, &q).unwrap();
    assert_eq!(r.set_side.status, Status::Falsified);
    assert!(r.agree);
    assert_eq!(r.witnesses_convert, Some(true), "{r:?}");
}

#[test]
fn mapping_witness_refutes_a_sampled_full_hold() {
    let scene = transversal::Scene::new(
        transversal::NormSpec::Max,
        vec![0.0, 0.0],
        vec![
            SetOracle::line(
                vec![0.0, 0.0],
                vec![-0.3936313861680221, 0.9192683676834754],
            ),
            SetOracle::half_space(vec![-0.6402856262118858, 0.768136912839406], 0.0),
        ],
    )
    .unwrap();
    let q = PropertyQuery::full(lin(0.5115437831460803), 0.3, 0.3)
        .with_budget(300)
        .with_seed(8);
    assert!(holds(certify(&scene, &q).unwrap().status));
    assert_eq!(
        certify(&scene, &q.clone().with_budget(3000))
            .unwrap()
            .status,
        Status::Falsified
    );
    let r = transfer_sets_to_mapping(&scene, &q).unwrap();
    assert_eq!(r.map_side.status, Status::Falsified);
    assert_eq!(r.set_side.status, Status::Falsified);
    let w = r.set_side.witness.as_ref().unwrap();
    assert!(transversal::certify::recheck(&scene, &q, w).unwrap());
    assert!(r.agree);
    assert_eq!(r.witnesses_convert, Some(true));
}

#[test]
fn full_delta_translation() {
    let g = lin(0.5);
    // φ⁻¹(0.1) = 0.05
    let (a, b) = sets_to_mapping_deltas(&g, Property::Full, 0.1, 0.2);
    assert!((a - 0.1).abs() < 1e-12 && (b - 0.15).abs() < 1e-12);
    let (a, b) = sets_to_mapping_deltas(&g, Property::Full, 1.0, 0.2);
    assert!((a - 0.2).abs() < 1e-12 && (b - 0.1).abs() < 1e-12);
    assert!(g.invert(a).unwrap() + b <= 0.2 + 1e-12);
}

#[test]
fn regularity_to_transversality_delta_arithmetic() {
    let id = lin(1.0);
    let (a, b) = regularity_to_transversality_deltas(&id, Property::Semi, 1.0, 1.0);
    assert!((a - 1.5).abs() < 1e-12 && (b - 1.5).abs() < 1e-12);
    for (p, d2, cap) in [(Property::Sub, 0.4, 0.4), (Property::Full, 0.4, 0.2)] {
        let (d1p, d2p) = regularity_to_transversality_deltas(&id, p, 1.0, d2);
        let psi = regularity_gauge(&id).unwrap();
        let t = psi.invert(d1p).unwrap();
        assert!(id.eval(2.0 * t).unwrap() <= 1.0 + 1e-12);
        assert!((t + d2p - cap).abs() < 1e-12, "{p:?} {t} {d2p}");
    }
}

#[test]
fn transversality_to_regularity_delta_arithmetic() {
    // ψ(t) = t/2 for φ(t) = t
    let id = lin(1.0);
    let (a, b) = transversality_to_regularity_deltas(&id, Property::Sub, 1.0, 0.4);
    assert!((a - 0.4).abs() < 1e-12 && (b - 0.4).abs() < 1e-12);
    let (a, b) = transversality_to_regularity_deltas(&id, Property::Semi, 0.7, 0.7);
    assert_eq!((a, b), (0.7, 0.7));
    let (a, b) = transversality_to_regularity_deltas(&id, Property::Full, 0.1, 0.4);
    let psi = transversality_gauge(&id).unwrap();
    assert!(a < 0.1 && psi.invert(a).unwrap() + b <= 0.4 + 1e-12);
}

#[test]
fn gauge_round_trip() {
    let phi = Gauge::scaled_power(3.0, 0.5).unwrap();
    let back = transversality_gauge(&regularity_gauge(&phi).unwrap()).unwrap();
    for t in [1e-6, 1e-3, 0.1, 0.5, 2.0] {
        let want = phi.eval(t).unwrap() + t / 2.0;
        assert!((back.eval(t).unwrap() - want).abs() < 1e-12 * want.max(1.0));
    }
}

#[test]
fn regular_cube_implies_transversal_graph_pair() {
    let (f, b) = func(FnKind::Cubic);
    let q = PropertyQuery::semi(cube_root(), 1.0).with_budget(4000);
    let r = transfer_regularity_to_transversality(&f, &b, &q).unwrap();
    assert!(holds(r.premise.status));
    assert!(holds(r.conclusion.as_ref().unwrap().status), "{r:?}");
    assert!(r.consistent);
}

#[test]
fn transversal_identity_graph_implies_regularity() {
    let (f, b) = func(FnKind::Identity);
    let q = PropertyQuery::full(lin(0.3), 0.1, 0.1).with_budget(4000);
    let r = transfer_transversality_to_regularity(&f, &b, &q).unwrap();
    assert!(holds(r.premise.status), "{r:?}");
    assert!(holds(r.conclusion.as_ref().unwrap().status), "{r:?}");
    let q = PropertyQuery::full(lin(1.0), 0.1, 0.1).with_budget(4000);
    let r = transfer_transversality_to_regularity(&f, &b, &q).unwrap();
    assert_eq!(r.premise.status, Status::Falsified);
    assert!(r.conclusion.is_none() && r.consistent);
}

#[test]
fn transfers_are_consistent_across_a_suite() {
    let kinds = [FnKind::Cubic, FnKind::Identity, FnKind::Square];
    let gauges = [
        lin(0.3),
        lin(1.0),
        cube_root(),
        Gauge::scaled_root(2.0).unwrap(),
    ];
    let props = [Property::Semi, Property::Sub, Property::Full];
    let mut concluded = 0;
    for (i, kind) in kinds.iter().enumerate() {
        for (j, g) in gauges.iter().enumerate() {
            let p = props[(i + j) % 3];
            let (f, b) = func(*kind);
            let q = PropertyQuery::new(p, g.clone(), 0.5, 0.5)
                .with_budget(1500)
                .with_seed((i * 4 + j) as u64);
            let a = transfer_transversality_to_regularity(&f, &b, &q).unwrap();
            let c = transfer_regularity_to_transversality(&f, &b, &q).unwrap();
            assert!(a.consistent, "{a:?}");
            assert!(c.consistent, "{c:?}");
            concluded += a.conclusion.is_some() as usize + c.conclusion.is_some() as usize;
        }
    }
    assert!(concluded >= 8, "{concluded}");
}

#[test]
fn holder_translation_arithmetic() {
    let h = holder_translation(1.0, 1.0 / 3.0).unwrap();
    assert!((h.alpha1 - 2f64.powf(-1.0 / 3.0)).abs() < 1e-12);
    assert!((h.alpha2 - 2f64.powf(1.0 / 3.0)).abs() < 1e-12);
    assert!((h.psi.eval(0.008).unwrap() - (0.2 / h.alpha1 + 0.008)).abs() < 1e-12);
    assert!((h.q_prime - 1.0 / 3.0).abs() < 1e-12);
    assert!((h.alpha_prime_sup - h.alpha1).abs() < 1e-12);
    let h = holder_translation(0.5, 1.0).unwrap();
    assert!((h.alpha_prime_sup - 1.0 / (1.0 + 1.0 / h.alpha1)).abs() < 1e-12);
    let h = holder_translation(0.5, 2.0).unwrap();
    assert!((h.alpha_prime_sup - 1.0).abs() < 1e-12);
}

fn sandwich_opts() -> ModulusOptions {
    ModulusOptions {
        budget: 600,
        sweep: 12,
        ..ModulusOptions::default()
    }
}

#[test]
fn cube_holder_sandwich() {
    let (f, b) = func(FnKind::Cubic);
    let s = holder_modulus_sandwich(&f, &b, Property::Semi, 1.0 / 3.0, sandwich_opts()).unwrap();
    assert!(
        s.mapping.lo <= 1.0 && s.mapping.hi >= 1.0,
        "{:?}",
        s.mapping
    );
    let c = 2f64.powf(1.0 / 3.0);
    assert!((s.predicted[0] - s.mapping.lo / (s.mapping.lo + c)).abs() < 1e-12);
    assert!(
        s.sets.lo >= 1.0 / (1.0 + c) - 0.02 && s.sets.hi <= 1.0 / c + 0.02,
        "{:?}",
        s.sets
    );
    assert!(s.lower_ok && s.upper_ok, "{s:?}");
}

#[test]
fn square_holder_sandwich_is_degenerate() {
    let (f, b) = func(FnKind::Square);
    let s = holder_modulus_sandwich(&f, &b, Property::Semi, 0.5, sandwich_opts()).unwrap();
    assert_eq!(s.mapping.lo, 0.0, "{:?}", s.mapping);
    assert_eq!(s.predicted[0], 0.0);
    assert!(s.lower_ok && s.upper_ok, "{s:?}");
}

#[test]
fn sandwich_rejects_orders_outside_the_unit_interval() {
    let (f, b) = func(FnKind::Cubic);
    assert!(holder_modulus_sandwich(&f, &b, Property::Semi, 1.0, sandwich_opts()).is_err());
}

#[test]
fn mapping_modulus_of_identity() {
    let (f, b) = func(FnKind::Identity);
    let e = estimate_mapping_modulus(&f, &b, Property::Sub, 1.0, sandwich_opts()).unwrap();
    assert!(e.lo <= 1.0 && e.hi >= 1.0 && e.hi - e.lo <= 0.04, "{e:?}");
}

#[test]
fn regularity_forms_on_products_of_translates() {
    let (f, b) = product_mapping(&scenes::crossing_lines()).unwrap();
    for alpha in [0.3, 0.6] {
        let q = PropertyQuery::full(lin(alpha), 0.1, 0.1).with_budget(3000);
        let r = certify_regular(&f, &b, &q).unwrap();
        assert!(r.implications_consistent, "{r:?}");
        assert_eq!(r.combined_iff_fixed, Some(true), "{r:?}");
    }
    let (f, b) = func(FnKind::Cubic);
    let r = certify_regular(
        &f,
        &b,
        &PropertyQuery::full(cube_root(), 1.0, 0.5).with_budget(3000),
    )
    .unwrap();
    assert!(r.implications_consistent && r.combined_iff_fixed.is_none());
}

#[test]
fn regularity_implies_semi_and_sub() {
    let (f, b) = func(FnKind::Identity);
    let q = PropertyQuery::full(lin(0.8), 0.5, 0.5).with_budget(2000);
    assert!(holds(certify_mapping(&f, &b, &q).unwrap().status));
    for iq in implied_by_regularity(&q).unwrap() {
        assert!(
            holds(certify_mapping(&f, &b, &iq).unwrap().status),
            "{iq:?}"
        );
    }
    assert!(implied_by_regularity(&PropertyQuery::semi(lin(1.0), 1.0)).is_err());
}

#[test]
fn mapping_to_a_singleton_matches_the_graph_pair() {
    let (f, b) = func(FnKind::Cubic);
    let target = TargetSet::new(
        SetOracle::Points {
            dim: 1,
            points: vec![vec![0.0]],
        },
        vec![0.0],
    )
    .unwrap();
    let q = PropertyQuery::sub(cube_root(), 0.5, 0.5).with_budget(2000);
    let r = mapping_to_set_transversality(&f, &target, &b, &q, false).unwrap();
    let direct = certify(&graph_sets(&f, &b).unwrap(), &q).unwrap();
    assert_eq!(r.verdict.status, direct.status);
}

/// `max d(p, ∩) / max{d(p, diagonal), d(p, H)}` over a grid, with
/// `H = {ξ₂ ≥ 0}` and `∩ = {(t, t) : t ≥ 0}` in the max norm.
fn diagonal_half_plane_ratio() -> f64 {
    let n = 200;
    let mut worst: f64 = 0.0;
    for i in -n..=n {
        for j in -n..=n {
            let (x, y) = (i as f64 / n as f64, j as f64 / n as f64);
            let d_diag = (x - y).abs() / 2.0;
            let d_h = (-y).max(0.0);
            let m = d_diag.max(d_h);
            if m == 0.0 {
                continue;
            }
            let t = ((x + y) / 2.0).max(0.0);
            let d_int = (x - t).abs().max((y - t).abs());
            worst = worst.max(d_int / m);
        }
    }
    worst
}

#[test]
fn identity_is_transversal_to_a_half_line() {
    let ratio = diagonal_half_plane_ratio();
    assert!((ratio - 3.0).abs() < 1e-9, "{ratio}");
    let (f, b) = func(FnKind::Identity);
    let target = TargetSet::new(SetOracle::half_space(vec![1.0], 0.0), vec![0.0]).unwrap();
    let q = PropertyQuery::sub(lin(0.3), 0.5, 0.5).with_budget(3000);
    let r = mapping_to_set_transversality(&f, &target, &b, &q, true).unwrap();
    assert!(holds(r.verdict.status), "{r:?}");
    assert!(r.cross_check.as_ref().unwrap().agree);
    let q = PropertyQuery::sub(lin(0.4), 0.5, 0.5).with_budget(3000);
    let r = mapping_to_set_transversality(&f, &target, &b, &q, true).unwrap();
    assert_eq!(r.verdict.status, Status::Falsified);
    assert!(r.cross_check.as_ref().unwrap().agree);
}

#[test]
fn target_point_must_be_the_base_image() {
    let (f, b) = func(FnKind::Identity);
    let target = TargetSet::new(SetOracle::half_space(vec![1.0], 0.0), vec![1.0]).unwrap();
    let q = PropertyQuery::semi(lin(1.0), 1.0);
    assert!(mapping_to_set_transversality(&f, &target, &b, &q, false).is_err());
}

#[test]
fn base_off_the_graph_is_rejected() {
    let (f, _) = func(FnKind::Cubic);
    let bad = GraphPoint {
        x: vec![1.0],
        y: vec![vec![0.0]],
    };
    let q = PropertyQuery::semi(lin(1.0), 1.0);
    assert!(matches!(
        certify_mapping(&f, &bad, &q),
        Err(Error::PremiseViolated(_))
    ));
}

#[test]
fn mapping_spec_parsing() {
    let (f, b) = MappingSpec::from_json(r#"{"fn": {"kind": "cubic"}}"#)
        .unwrap()
        .resolve(Path::new("."))
        .unwrap();
    assert_eq!(f, MappingOracle::single_valued(FnKind::Cubic));
    assert_eq!(b.x, vec![0.0]);
    let spec = r#"{"graph_set": {"set": {"affine_line": {"point": [0, 0], "direction": [1, 2]}}, "dim_x": 1},
                  "base": {"x": [1], "y": [[2]]}}"#;
    let (f, b) = MappingSpec::from_json(spec)
        .unwrap()
        .resolve(Path::new("."))
        .unwrap();
    assert_eq!(f.dim_y(), 1);
    assert_eq!(b.y, vec![vec![2.0]]);
    assert!(matches!(
        MappingSpec::from_json(r#"{"fn": {"kind": "sine"}}"#),
        Err(Error::Schema { .. })
    ));
    assert!(matches!(
        MappingSpec::from_json(r#"{"fun": 1}"#),
        Err(Error::Schema { .. })
    ));
    let both =
        MappingSpec::from_json(r#"{"fn": {"kind": "cubic"}, "product_of": "x.json"}"#).unwrap();
    assert!(matches!(
        both.resolve(Path::new(".")),
        Err(Error::Schema { .. })
    ));
    let none = MappingSpec::from_json("{}").unwrap();
    assert!(matches!(
        none.resolve(Path::new(".")),
        Err(Error::Schema { .. })
    ));
}

fn random_scene() -> impl Strategy<Value = (usize, u64)> {
    (0usize..6, 0u64..1000)
}

fn scene_by_index(i: usize) -> transversal::Scene {
    match i {
        0 => scenes::axes(),
        1 => scenes::crossing_lines(),
        2 => scenes::tangent_parabolas(),
        3 => scenes::opposite_parabolas(),
        4 => scenes::half_plane_under_parabola(),
        _ => scenes::overlapping_balls(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn semi_and_sub_agree_on_identical_deltas((i, seed) in random_scene(), alpha in 0.1f64..1.2, sub in any::<bool>()) {
        let g = lin(alpha);
        let q = if sub { PropertyQuery::sub(g, 0.3, 0.3) } else { PropertyQuery::semi(g, 0.3) };
        let r = transfer_sets_to_mapping(&scene_by_index(i), &q.with_budget(300).with_seed(seed)).unwrap();
        prop_assert!(r.agree, "{:?}", r);
        prop_assert_eq!(r.witnesses_convert, Some(true));
    }

    #[test]
    fn full_transfer_is_consistent((i, seed) in random_scene(), alpha in 0.1f64..1.2) {
        let q = PropertyQuery::full(lin(alpha), 0.3, 0.3).with_budget(300).with_seed(seed);
        let r = transfer_sets_to_mapping(&scene_by_index(i), &q).unwrap();
        prop_assert!(r.agree, "{:?}", r);
        prop_assert_ne!(r.witnesses_convert, Some(false));
    }

    #[test]
    fn product_base_is_in_its_own_image((i, _) in random_scene()) {
        let (f, b) = product_mapping(&scene_by_index(i)).unwrap();
        let (lo, _) = f.image_bounds(&b.x, &b.y, 0);
        prop_assert!(lo <= 1e-9);
    }

    #[test]
    fn full_translation_stays_inside_the_set_ball(alpha in 0.05f64..5.0, d1 in 0.01f64..2.0, d2 in 0.01f64..2.0) {
        let g = lin(alpha);
        let (a, b) = sets_to_mapping_deltas(&g, Property::Full, d1, d2);
        prop_assert!(a > 0.0 && a <= d1 && b > 0.0);
        prop_assert!(g.invert(a).unwrap() + b <= d2 * (1.0 + 1e-12));
    }

    #[test]
    fn implied_deltas_are_admissible(q in 0.2f64..2.0, d1 in 0.01f64..2.0, d2 in 0.01f64..2.0) {
        let phi = Gauge::power(1.0, q).unwrap();
        let psi = regularity_gauge(&phi).unwrap();
        for (p, cap) in [(Property::Sub, d2), (Property::Full, d2 / 2.0)] {
            let (a, b) = regularity_to_transversality_deltas(&phi, p, d1, d2);
            let t = psi.invert(a).unwrap();
            prop_assert!(a > 0.0 && b > 0.0);
            prop_assert!(phi.eval(2.0 * t).unwrap() <= d1 * (1.0 + 1e-9));
            prop_assert!(t + b <= cap * (1.0 + 1e-9));
        }
        let psi = transversality_gauge(&phi).unwrap();
        let (a, b) = transversality_to_regularity_deltas(&phi, Property::Full, d1, d2);
        prop_assert!(a > 0.0 && a < d1 && b > 0.0);
        prop_assert!(psi.invert(a).unwrap() + b <= d2 * (1.0 + 1e-9));
        let (a, _) = transversality_to_regularity_deltas(&phi, Property::Sub, d1, d2);
        prop_assert!(a <= d1 && a <= psi.eval(2.0 * d2).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn mapping_to_set_cross_check_agrees(kind in 0usize..3, half in any::<bool>(), alpha in 0.2f64..1.0, seed in 0u64..1000) {
        let kind = [FnKind::Cubic, FnKind::Identity, FnKind::Square][kind];
        let (f, b) = func(kind);
        let set = if half {
            SetOracle::half_space(vec![1.0], 0.0)
        } else {
            SetOracle::Points { dim: 1, points: vec![vec![0.0]] }
        };
        let target = TargetSet::new(set, vec![0.0]).unwrap();
        let q = PropertyQuery::sub(lin(alpha), 0.3, 0.3).with_budget(300).with_seed(seed);
        let r = mapping_to_set_transversality(&f, &target, &b, &q, true).unwrap();
        let c = r.cross_check.unwrap();
        prop_assert!(c.agree, "{:?}", c);
    }
}
