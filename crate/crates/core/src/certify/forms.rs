//! Metric forms of the three properties, their samplers, and the probes they
//! reduce to.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Lhs, Probe, PropertyQuery, Raw, R_MIN};
use crate::error::{invalid, Result};
use crate::gauges::Gauge;
use crate::geometry::{add, zeros, NormSpec, Point};
use crate::rng::{at_radius, log_uniform};
use crate::sets::{Scene, SetOracle};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Form {
    /// `d(x̄, ⋂(Ωᵢ − xᵢ)) ≤ φ(max‖xᵢ‖)` for `φ(max‖xᵢ‖) < δ`.
    Semi,
    /// `d(x, ⋂Ωᵢ) ≤ φ(max d(x, Ωᵢ))` for `x ∈ B_δ₂(x̄)`.
    Sub,
    /// `d(0, ⋂(Ωᵢ − ωᵢ − xᵢ)) ≤ φ(max‖xᵢ‖)` with `ωᵢ + xᵢ` a common point of `B_δ₂(x̄)`.
    SubAnchored,
    /// `d(0, ⋂(Ωᵢ − ωᵢ − xᵢ)) ≤ φ(max‖xᵢ‖)` for `ωᵢ ∈ Ωᵢ ∩ B_δ₂(x̄)`.
    Full,
    /// As `Full`, for `ωᵢ ∈ Ωᵢ` with `ωᵢ + xᵢ ∈ B_δ₂(x̄)`.
    FullAnchorSum,
    /// `d(x̄, ⋂(Ωᵢ − xᵢ)) ≤ φ(max d(x̄, Ωᵢ − xᵢ))` for `xᵢ ∈ δ₂𝔹`.
    ShiftedBase,
    /// `d(x, ⋂(Ωᵢ − xᵢ)) ≤ φ(max d(x, Ωᵢ − xᵢ))` for `x + xᵢ ∈ B_δ₂(x̄)`.
    ShiftedPoint,
    /// `Semi` with the last set left in place.
    OneSidedSemi,
    /// `Sub` restricted to `x ∈ Ωₙ`, measuring only the other sets.
    OneSidedSub,
    /// `Full` with the last set anchored but not shifted.
    OneSidedFull,
    /// Two sets: `d(x̄, (Ω₁ − x) ∩ Ω₂) ≤ φ(‖x‖)` for `‖x‖ ≤ t̄`.
    RestrictedSemi,
    /// Two sets: `d(x, Ω₁ ∩ Ω₂) ≤ φ(d(x, Ω₁))` for `x ∈ Ω₂ ∩ B_2δ₂(x̄)`, `d(x, Ω₁) < t̄`.
    RestrictedSub,
    /// Two sets: `d(0, (Ω₁ − ω₁ − x) ∩ (Ω₂ − ω₂)) ≤ φ(‖x‖)` for `ωᵢ ∈ Ωᵢ ∩ B_δ₂(x̄)`, `‖x‖ ≤ t̄`.
    RestrictedFull,
    /// Mapping: `d(x̄, F⁻¹(y)) ≤ φ(‖y − ȳ‖)` for `φ(‖y − ȳ‖) < δ`.
    MapSemi,
    /// Mapping: `d(x, F⁻¹(ȳ)) ≤ φ(d(ȳ, F(x)))` for `x ∈ B_δ₂(x̄)`.
    MapSub,
    /// Mapping: `d(x, F⁻¹(y)) ≤ φ(d(y, F(x)))` for `‖x − x̄‖ + ‖y − ȳ‖ < δ₂`.
    MapRegular,
    /// As `MapRegular` for `x ∈ B_δ₂(x̄)` and `y ∈ B_δ₂(ȳ)`.
    MapRegularBox,
    /// As `MapRegular` with `x = x̄` and `y ∈ B_δ₂(ȳ)`.
    MapRegularFixed,
}

impl Form {
    /// Whether the form belongs to a set-valued mapping rather than a scene.
    pub fn is_mapping(self) -> bool {
        matches!(
            self,
            Form::MapSemi
                | Form::MapSub
                | Form::MapRegular
                | Form::MapRegularBox
                | Form::MapRegularFixed
        )
    }
}

/// Admissible region of a query. For restricted forms `delta1` is `t̄`.
pub(crate) struct Domain {
    pub gauge: Gauge,
    pub delta1: f64,
    pub delta2: f64,
    /// `φ⁻¹(δ₁)`, the largest admissible gauge argument.
    pub r1: f64,
}

impl Domain {
    pub fn of(q: &PropertyQuery) -> Self {
        Domain {
            gauge: q.gauge.clone(),
            delta1: q.delta1,
            delta2: q.delta2(),
            r1: q.gauge.inv(q.delta1),
        }
    }

    fn below_delta1(&self, arg: f64) -> bool {
        self.gauge.at(arg) < self.delta1
    }
}

pub(crate) fn radius(rng: &mut ChaCha8Rng, hi: f64) -> f64 {
    log_uniform(rng, R_MIN * hi, hi * (1.0 - 1e-12))
}

/// `n` shifts whose largest norm is exactly `r`. A quarter of the tuples are
/// `±v` for a single vector `v` with both signs present; otherwise shifts are
/// independent with norm `r`, a random fraction of it, or zero.
pub(crate) fn shift_tuple(
    rng: &mut ChaCha8Rng,
    n: usize,
    d: usize,
    r: f64,
    norm: NormSpec,
) -> Vec<Point> {
    if n >= 2 && rng.gen_range(0..4) == 0 {
        let v = at_radius(rng, d, r, norm);
        let flip = rng.gen_range(1..n);
        let first_negative: bool = rng.gen();
        return (0..n)
            .map(|i| {
                let negative = (i >= flip) != first_negative;
                if negative {
                    v.iter().map(|c| -c).collect()
                } else {
                    v.clone()
                }
            })
            .collect();
    }
    let star = rng.gen_range(0..n);
    (0..n)
        .map(|i| {
            let f = if i == star {
                1.0
            } else {
                match rng.gen_range(0..4) {
                    0 | 1 => 1.0,
                    2 => rng.gen::<f64>(),
                    _ => 0.0,
                }
            };
            at_radius(rng, d, r * f, norm)
        })
        .collect()
}

/// A point of `set` within `radius` of `center` (which must belong to the set).
pub(crate) fn anchor(
    rng: &mut ChaCha8Rng,
    set: &SetOracle,
    center: &[f64],
    radius_hi: f64,
    norm: NormSpec,
) -> Point {
    if rng.gen_range(0..4) == 0 {
        return center.to_vec();
    }
    let r = radius(rng, radius_hi);
    let u = add(center, &at_radius(rng, center.len(), r, norm));
    let p = set.project_unchecked(&u, norm);
    if norm.dist(&p, center) < radius_hi {
        p
    } else {
        center.to_vec()
    }
}

/// A point of `B_hi(x̄)`; a quarter of the draws are perturbations of points
/// on one of the sets, where error bounds are tightest.
pub(crate) fn test_point(rng: &mut ChaCha8Rng, scene: &Scene, hi: f64) -> Point {
    let xb = &scene.basepoint;
    let r = radius(rng, hi);
    if rng.gen_range(0..4) == 0 {
        let j = rng.gen_range(0..scene.n());
        let w = anchor(rng, &scene.sets[j], xb, r, scene.norm);
        let r2 = radius(rng, r);
        let p = add(&w, &at_radius(rng, xb.len(), r2, scene.norm));
        if scene.norm.dist(&p, xb) < hi {
            return p;
        }
    }
    add(xb, &at_radius(rng, xb.len(), r, scene.norm))
}

fn shift_scale(rng: &mut ChaCha8Rng, dom: &Domain, cap: f64) -> f64 {
    if rng.gen_bool(0.5) {
        cap
    } else {
        cap.min(dom.r1)
    }
}

fn translate_all(sets: &[SetOracle], shifts: &[Point]) -> Vec<SetOracle> {
    sets.iter()
        .zip(shifts)
        .map(|(s, x)| s.translated(x))
        .collect()
}

fn max_norm(norm: NormSpec, v: &[Point]) -> f64 {
    v.iter().map(|p| norm.of(p)).fold(0.0, f64::max)
}

fn max_dist(norm: NormSpec, sets: &[SetOracle], x: &[f64]) -> f64 {
    sets.iter().map(|s| s.d(x, norm)).fold(0.0, f64::max)
}

impl Form {
    pub fn check_scene(self, scene: &Scene) -> Result<()> {
        let n = scene.n();
        if self.is_mapping() {
            return Err(invalid(
                "mapping forms are certified through the maps module",
            ));
        }
        match self {
            Form::RestrictedSemi | Form::RestrictedSub | Form::RestrictedFull if n != 2 => Err(
                invalid(format!("restricted forms need exactly two sets, got {n}")),
            ),
            Form::OneSidedSemi | Form::OneSidedSub | Form::OneSidedFull if n < 2 => {
                Err(invalid("one-sided forms need at least two sets"))
            }
            _ => Ok(()),
        }
    }

    pub(crate) fn sample(self, scene: &Scene, dom: &Domain, rng: &mut ChaCha8Rng) -> Raw {
        let (n, d, norm) = (scene.n(), scene.dimension, scene.norm);
        let xb = &scene.basepoint;
        let anchors = |rng: &mut ChaCha8Rng, radius_hi: f64| -> Vec<Point> {
            scene
                .sets
                .iter()
                .map(|s| anchor(rng, s, xb, radius_hi, norm))
                .collect()
        };
        match self {
            Form::Semi | Form::OneSidedSemi => {
                let r = radius(rng, dom.r1);
                let mut shifts = shift_tuple(rng, n, d, r, norm);
                if self == Form::OneSidedSemi {
                    shifts = shift_tuple(rng, n - 1, d, r, norm);
                    shifts.push(zeros(d));
                }
                Raw {
                    shifts,
                    ..Raw::default()
                }
            }
            Form::Sub => {
                let hi = shift_scale(rng, dom, dom.delta2);
                Raw {
                    point: Some(test_point(rng, scene, hi)),
                    ..Raw::default()
                }
            }
            Form::SubAnchored => {
                let hi = shift_scale(rng, dom, dom.delta2);
                let x = test_point(rng, scene, hi);
                let r = radius(rng, dom.r1);
                let anchors = scene
                    .sets
                    .iter()
                    .map(|s| {
                        let p = s.project_unchecked(&x, norm);
                        if rng.gen_bool(0.5) {
                            p
                        } else {
                            let u = add(&x, &at_radius(rng, d, r, norm));
                            s.project_unchecked(&u, norm)
                        }
                    })
                    .collect();
                Raw {
                    anchors,
                    point: Some(x),
                    ..Raw::default()
                }
            }
            Form::Full | Form::OneSidedFull => {
                let anchors = anchors(rng, dom.delta2);
                let r = radius(rng, dom.r1);
                let mut shifts = shift_tuple(rng, n, d, r, norm);
                if self == Form::OneSidedFull {
                    shifts = shift_tuple(rng, n - 1, d, r, norm);
                    shifts.push(zeros(d));
                }
                Raw {
                    shifts,
                    anchors,
                    point: None,
                }
            }
            Form::FullAnchorSum => {
                let anchors = anchors(rng, dom.delta2);
                let r = radius(rng, dom.r1);
                let shifts = shift_tuple(rng, n, d, r, norm);
                Raw {
                    shifts,
                    anchors,
                    point: None,
                }
            }
            Form::ShiftedBase => {
                let hi = shift_scale(rng, dom, dom.delta2);
                let r = radius(rng, hi);
                Raw {
                    shifts: shift_tuple(rng, n, d, r, norm),
                    ..Raw::default()
                }
            }
            Form::ShiftedPoint => {
                let hi = shift_scale(rng, dom, dom.delta2);
                let x = test_point(rng, scene, hi);
                let hi = shift_scale(rng, dom, dom.delta2);
                let r = radius(rng, hi);
                Raw {
                    shifts: shift_tuple(rng, n, d, r, norm),
                    point: Some(x),
                    ..Raw::default()
                }
            }
            Form::OneSidedSub => {
                let hi = shift_scale(rng, dom, dom.delta2);
                Raw {
                    point: Some(anchor(rng, &scene.sets[n - 1], xb, hi, norm)),
                    ..Raw::default()
                }
            }
            Form::RestrictedSemi => {
                let r = radius(rng, dom.delta1);
                Raw {
                    shifts: vec![at_radius(rng, d, r, norm)],
                    ..Raw::default()
                }
            }
            Form::RestrictedSub => Raw {
                point: Some(anchor(rng, &scene.sets[1], xb, 2.0 * dom.delta2, norm)),
                ..Raw::default()
            },
            Form::RestrictedFull => {
                let anchors = anchors(rng, dom.delta2);
                let r = radius(rng, dom.delta1);
                Raw {
                    anchors,
                    shifts: vec![at_radius(rng, d, r, norm)],
                    point: None,
                }
            }
            _ => Raw::default(),
        }
    }

    /// Reduce raw data to a probe, or `None` when it falls outside the
    /// admissible region or is degenerate (zero perturbation, point already in
    /// the intersection).
    pub(crate) fn build(self, scene: &Scene, dom: &Domain, raw: &Raw) -> Option<Probe> {
        let (n, d, norm) = (scene.n(), scene.dimension, scene.norm);
        let xb = &scene.basepoint;
        let sets = &scene.sets;
        let in_ball = |p: &[f64], r: f64| norm.dist(p, xb) < r;
        let member = |s: &SetOracle, p: &[f64]| s.d(p, norm) <= 1e-9 * (1.0 + norm.of(p));
        let shape_ok = |k: usize, v: &[Point]| v.len() == k && v.iter().all(|p| p.len() == d);
        let point_ok = |p: &Option<Point>| p.as_ref().is_some_and(|p| p.len() == d);
        match self {
            Form::Semi | Form::OneSidedSemi => {
                if !shape_ok(n, &raw.shifts) {
                    return None;
                }
                if self == Form::OneSidedSemi && norm.of(&raw.shifts[n - 1]) != 0.0 {
                    return None;
                }
                let arg = max_norm(norm, &raw.shifts);
                if arg == 0.0 || !dom.below_delta1(arg) {
                    return None;
                }
                Some(Probe {
                    lhs: Lhs::Intersection {
                        sets: translate_all(sets, &raw.shifts),
                        point: xb.clone(),
                    },
                    arg,
                })
            }
            Form::Sub | Form::OneSidedSub => {
                if !point_ok(&raw.point) {
                    return None;
                }
                let x = raw.point.as_ref().unwrap();
                if !in_ball(x, dom.delta2) {
                    return None;
                }
                let measured = if self == Form::OneSidedSub {
                    if !member(&sets[n - 1], x) {
                        return None;
                    }
                    &sets[..n - 1]
                } else {
                    &sets[..]
                };
                let arg = max_dist(norm, measured, x);
                if arg == 0.0 || !dom.below_delta1(arg) {
                    return None;
                }
                Some(Probe {
                    lhs: self.intersection_lhs(scene, x),
                    arg,
                })
            }
            Form::SubAnchored => {
                if !point_ok(&raw.point) || !shape_ok(n, &raw.anchors) {
                    return None;
                }
                let x = raw.point.as_ref().unwrap();
                if !in_ball(x, dom.delta2)
                    || !sets.iter().zip(&raw.anchors).all(|(s, w)| member(s, w))
                {
                    return None;
                }
                let arg = raw
                    .anchors
                    .iter()
                    .map(|w| norm.dist(x, w))
                    .fold(0.0, f64::max);
                if arg == 0.0 || !dom.below_delta1(arg) {
                    return None;
                }
                Some(Probe {
                    lhs: self.intersection_lhs(scene, x),
                    arg,
                })
            }
            Form::Full | Form::FullAnchorSum | Form::OneSidedFull => {
                if !shape_ok(n, &raw.shifts) || !shape_ok(n, &raw.anchors) {
                    return None;
                }
                if self == Form::OneSidedFull && norm.of(&raw.shifts[n - 1]) != 0.0 {
                    return None;
                }
                for ((s, w), x) in sets.iter().zip(&raw.anchors).zip(&raw.shifts) {
                    let placed = match self {
                        Form::FullAnchorSum => in_ball(&add(w, x), dom.delta2),
                        _ => in_ball(w, dom.delta2),
                    };
                    if !member(s, w) || !placed {
                        return None;
                    }
                }
                let arg = max_norm(norm, &raw.shifts);
                if arg == 0.0 || !dom.below_delta1(arg) {
                    return None;
                }
                let total: Vec<Point> = raw
                    .anchors
                    .iter()
                    .zip(&raw.shifts)
                    .map(|(w, x)| add(w, x))
                    .collect();
                Some(Probe {
                    lhs: Lhs::Intersection {
                        sets: translate_all(sets, &total),
                        point: zeros(d),
                    },
                    arg,
                })
            }
            Form::ShiftedBase => {
                if !shape_ok(n, &raw.shifts) || max_norm(norm, &raw.shifts) > dom.delta2 {
                    return None;
                }
                let shifted = translate_all(sets, &raw.shifts);
                let arg = max_dist(norm, &shifted, xb);
                if arg == 0.0 || !dom.below_delta1(arg) {
                    return None;
                }
                Some(Probe {
                    lhs: Lhs::Intersection {
                        sets: shifted,
                        point: xb.clone(),
                    },
                    arg,
                })
            }
            Form::ShiftedPoint => {
                if !point_ok(&raw.point) || !shape_ok(n, &raw.shifts) {
                    return None;
                }
                let x = raw.point.as_ref().unwrap();
                if !raw.shifts.iter().all(|s| in_ball(&add(x, s), dom.delta2)) {
                    return None;
                }
                let shifted = translate_all(sets, &raw.shifts);
                let arg = max_dist(norm, &shifted, x);
                if arg == 0.0 || !dom.below_delta1(arg) {
                    return None;
                }
                Some(Probe {
                    lhs: Lhs::Intersection {
                        sets: shifted,
                        point: x.clone(),
                    },
                    arg,
                })
            }
            Form::RestrictedSemi => {
                if !shape_ok(1, &raw.shifts) {
                    return None;
                }
                let arg = norm.of(&raw.shifts[0]);
                if arg == 0.0 || arg > dom.delta1 {
                    return None;
                }
                Some(Probe {
                    lhs: Lhs::Intersection {
                        sets: vec![sets[0].translated(&raw.shifts[0]), sets[1].clone()],
                        point: xb.clone(),
                    },
                    arg,
                })
            }
            Form::RestrictedSub => {
                if !point_ok(&raw.point) {
                    return None;
                }
                let x = raw.point.as_ref().unwrap();
                if !in_ball(x, 2.0 * dom.delta2) || !member(&sets[1], x) {
                    return None;
                }
                let arg = sets[0].d(x, norm);
                if arg == 0.0 || arg >= dom.delta1 {
                    return None;
                }
                Some(Probe {
                    lhs: self.intersection_lhs(scene, x),
                    arg,
                })
            }
            Form::RestrictedFull => {
                if !shape_ok(1, &raw.shifts) || !shape_ok(2, &raw.anchors) {
                    return None;
                }
                for (s, w) in sets.iter().zip(&raw.anchors) {
                    if !member(s, w) || !in_ball(w, dom.delta2) {
                        return None;
                    }
                }
                let arg = norm.of(&raw.shifts[0]);
                if arg == 0.0 || arg > dom.delta1 {
                    return None;
                }
                Some(Probe {
                    lhs: Lhs::Intersection {
                        sets: vec![
                            sets[0].translated(&add(&raw.anchors[0], &raw.shifts[0])),
                            sets[1].translated(&raw.anchors[1]),
                        ],
                        point: zeros(d),
                    },
                    arg,
                })
            }
            _ => None,
        }
    }

    /// `d(x, ⋂Ωᵢ)`, through the declared intersection when the scene has one.
    fn intersection_lhs(self, scene: &Scene, x: &[f64]) -> Lhs {
        match &scene.intersection {
            Some(inter) => Lhs::Exact(inter.d(x, scene.norm)),
            None => Lhs::Intersection {
                sets: scene.sets.clone(),
                point: x.to_vec(),
            },
        }
    }
}
