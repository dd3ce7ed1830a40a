//! Sampled checkers for the slope sufficient conditions of semi-, sub- and
//! full transversality.
//!
//! Each outer sample fixes the data the condition quantifies over first
//! (shifts, an off-intersection point, or reference anchors with a radius).
//! For each `λ` on a geometric grid inside the admissible interval the
//! checker collects anchors from an Ekeland descent started where the
//! existence argument starts, plus random anchors, keeps those satisfying
//! the anchor constraints, and evaluates the sampled nonlocal γ-slope of the
//! restricted coupled objective at each. The outer sample fails when every
//! `λ` admits an anchor with slope below `1 − tol`.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::coupled::{Config, CoupledObjective, Moves, ZeroSet};
use crate::certify::{anchor, radius, shift_tuple, test_point, Property};
use crate::error::{invalid, Result};
use crate::gauges::Gauge;
use crate::geometry::{add, sub, Point};
use crate::json::ext_f64;
use crate::rng::{at_radius, log_uniform, stream, uniform_in_ball};
use crate::sets::Scene;

/// Slopes below `1 − SLOPE_TOL` count as violations.
pub const SLOPE_TOL: f64 = 1e-6;
const GRID: usize = 8;
const DESCENT_STEPS: usize = 60;
const DESCENT_MOVES: usize = 8;
const SLOPE_MOVES: usize = 48;
const CHUNK: usize = 32;
/// Step of the difference quotient for the differentiable-gauge form.
const C1_STEP: f64 = 1e-6;
/// Anchors whose spread is below this fraction of the admissible bound are
/// treated as zeros of the objective (rounding in the nearest-point
/// computations leaves spreads of order 1e−16 relative).
const ZERO_FLOOR: f64 = 1e-9;

/// Which anchor region the condition is checked on.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnchorRule {
    /// Constraints tied to `λ` and the outer data.
    #[default]
    Theorem,
    /// Fixed balls determined by `δ₁`, `δ₂` and `γ`.
    Simplified,
    /// Balls of radius `δ₁` around the reference point.
    DeltaFree,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlopeConditionQuery {
    pub gauge: Gauge,
    /// `δ` for semitransversality.
    pub delta1: f64,
    #[serde(default)]
    pub delta2: Option<f64>,
    pub gamma: f64,
    /// Outer samples.
    pub budget: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub rule: AnchorRule,
    /// Keep only outer data whose shifted intersection is farther than the
    /// gauge value, as the existence argument allows.
    #[serde(default)]
    pub strengthen: bool,
    #[serde(default = "default_random_anchors")]
    pub random_anchors: usize,
}

fn default_random_anchors() -> usize {
    4
}

impl SlopeConditionQuery {
    pub fn new(gauge: Gauge, delta1: f64, delta2: f64, gamma: f64) -> Self {
        SlopeConditionQuery {
            gauge,
            delta1,
            delta2: Some(delta2),
            gamma,
            budget: 200,
            seed: 0,
            rule: AnchorRule::Theorem,
            strengthen: false,
            random_anchors: default_random_anchors(),
        }
    }

    pub fn semi(gauge: Gauge, delta: f64, gamma: f64) -> Self {
        let mut q = Self::new(gauge, delta, delta, gamma);
        q.delta2 = None;
        q
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_rule(mut self, rule: AnchorRule) -> Self {
        self.rule = rule;
        self
    }

    pub fn strengthened(mut self) -> Self {
        self.strengthen = true;
        self
    }

    pub fn delta2(&self) -> f64 {
        self.delta2.unwrap_or(self.delta1)
    }

    pub fn validate(&self) -> Result<()> {
        self.gauge.validate()?;
        if !(self.delta1 > 0.0
            && self.delta2() > 0.0
            && self.delta1.is_finite()
            && self.delta2().is_finite())
        {
            return Err(invalid("δ₁ and δ₂ must be positive"));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(invalid("γ must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ConditionStatus {
    ConditionSeenTrue,
    ConditionSeenFalse,
}

impl ConditionStatus {
    pub fn exit_code(self) -> i32 {
        match self {
            ConditionStatus::ConditionSeenTrue => 0,
            ConditionStatus::ConditionSeenFalse => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeWitness {
    pub outer_index: u64,
    /// Shifts of the objective (`xᵢ`); empty for subtransversality.
    pub shifts: Vec<Point>,
    /// Reference anchors `ω′ᵢ` and point (`x̄` or `x′`).
    pub reference: Config,
    /// Every `λ` on this grid admits the failing anchor.
    pub lambdas: Vec<f64>,
    pub anchor: Config,
    pub value: f64,
    pub slope: f64,
    /// Whether the anchor is an Ekeland descent iterate.
    pub from_descent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeCheck {
    pub status: ConditionStatus,
    pub property: Property,
    pub rule: AnchorRule,
    pub gamma: f64,
    pub outer_samples: usize,
    /// Outer samples excluded by the premise filters.
    pub vacuous: usize,
    pub anchors_checked: usize,
    #[serde(with = "ext_f64")]
    pub min_slope: f64,
    /// Anchors where the differentiable-gauge form was evaluated.
    pub c1_checked: usize,
    /// Of those, anchors where it fell below `1 − tol`.
    pub c1_violations: usize,
    pub tol: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<SlopeWitness>,
}

/// Outer data of one sample.
struct Outer {
    /// Objective shifts; empty for subtransversality.
    shifts: Vec<Point>,
    /// `ω′ᵢ`
    reference: Vec<Point>,
    /// `x̄` or `x′`
    x_ref: Point,
    start: Config,
    /// Largest admissible spread at an anchor.
    bound: f64,
    /// Left end of the `λ` interval.
    lam_lo: f64,
}

struct Ctx<'a> {
    scene: &'a Scene,
    q: &'a SlopeConditionQuery,
    property: Property,
    /// `φ⁻¹(δ₁)`
    r1: f64,
}

impl Ctx<'_> {
    fn xbar(&self) -> &Point {
        &self.scene.basepoint
    }

    fn dist(&self, a: &[f64], b: &[f64]) -> f64 {
        self.scene.norm.dist(a, b)
    }

    fn sample_outer(&self, rng: &mut ChaCha8Rng, index: u64) -> Option<Outer> {
        let scene = self.scene;
        let norm = scene.norm;
        let (n, d) = (scene.n(), scene.dimension);
        let g = &self.q.gauge;
        let xbar = self.xbar().clone();
        let zero_lower = |shifts: &[Point]| {
            let sets: Vec<_> = scene
                .sets
                .iter()
                .zip(shifts)
                .map(|(s, x)| s.translated(x))
                .collect();
            ZeroSet::Sets(sets).dist_lower(&xbar, norm, index)
        };
        match self.property {
            Property::Semi => {
                let s = radius(rng, self.r1);
                let offsets = shift_tuple(rng, n, d, s, norm);
                let s = offsets.iter().map(|x| norm.of(x)).fold(0.0, f64::max);
                if !(s > 0.0 && g.at(s) < self.q.delta1) {
                    return None;
                }
                let shifts = offsets;
                if self.q.strengthen && !(g.at(s) < zero_lower(&shifts)) {
                    return None;
                }
                Some(Outer {
                    reference: vec![xbar.clone(); n],
                    start: Config {
                        omegas: vec![xbar.clone(); n],
                        x: xbar.clone(),
                    },
                    x_ref: xbar,
                    bound: s,
                    lam_lo: g.at(s),
                    shifts,
                })
            }
            Property::Sub => {
                let xp = test_point(rng, scene, self.q.delta2());
                let md = scene.max_dist(&xp);
                if !(md > 0.0 && g.at(md) < self.q.delta1) {
                    return None;
                }
                if self.q.strengthen {
                    let inter = match &scene.intersection {
                        Some(s) => s.d(&xp, norm),
                        None => ZeroSet::Sets(scene.sets.clone()).dist_lower(&xp, norm, index),
                    };
                    if !(g.at(md) < inter) {
                        return None;
                    }
                }
                let reference: Vec<Point> = scene
                    .sets
                    .iter()
                    .map(|s| s.project_unchecked(&xp, norm))
                    .collect();
                let bound = reference
                    .iter()
                    .map(|w| norm.dist(w, &xp))
                    .fold(0.0, f64::max);
                if !(bound > 0.0 && g.at(bound) < self.q.delta1) {
                    return None;
                }
                Some(Outer {
                    shifts: Vec::new(),
                    start: Config {
                        omegas: reference.clone(),
                        x: xp.clone(),
                    },
                    reference,
                    x_ref: xp,
                    bound,
                    lam_lo: g.at(bound),
                })
            }
            Property::Full => {
                let reference: Vec<Point> = scene
                    .sets
                    .iter()
                    .map(|s| anchor(rng, s, &xbar, self.q.delta2(), norm))
                    .collect();
                let xi = radius(rng, self.r1);
                let offsets = shift_tuple(rng, n, d, xi, norm);
                let xi = offsets.iter().map(|x| norm.of(x)).fold(0.0, f64::max);
                if !(xi > 0.0 && g.at(xi) < self.q.delta1) {
                    return None;
                }
                let shifts: Vec<Point> = reference
                    .iter()
                    .zip(&offsets)
                    .map(|(w, o)| sub(&add(w, o), &xbar))
                    .collect();
                if self.q.strengthen && !(g.at(xi) < zero_lower(&shifts)) {
                    return None;
                }
                Some(Outer {
                    start: Config {
                        omegas: reference.clone(),
                        x: xbar.clone(),
                    },
                    reference,
                    x_ref: xbar,
                    bound: xi,
                    lam_lo: g.at(xi),
                    shifts,
                })
            }
        }
    }

    fn lambdas(&self, o: &Outer) -> Vec<f64> {
        let hi = self.q.delta1;
        match self.q.rule {
            AnchorRule::Theorem => {
                let ratio = hi / o.lam_lo;
                (1..=GRID)
                    .map(|k| o.lam_lo * ratio.powf(k as f64 / (GRID + 1) as f64))
                    .filter(|l| *l > o.lam_lo && *l < hi)
                    .collect()
            }
            _ => vec![hi],
        }
    }

    /// Radius of the ball the free point `x` is confined to, around `o.x_ref`
    /// for the theorem rule and around `x̄` otherwise.
    fn x_radius(&self, lam: f64) -> f64 {
        let (d1, d2) = (self.q.delta1, self.q.delta2());
        match (self.q.rule, self.property) {
            (AnchorRule::Theorem, _) => lam,
            (AnchorRule::Simplified, Property::Sub) => d1 + d2,
            _ => d1,
        }
    }

    fn valid(&self, obj: &CoupledObjective, o: &Outer, lam: f64, a: &Config) -> bool {
        let q = self.q;
        let (d1, d2, gamma) = (q.delta1, q.delta2(), q.gamma);
        let m = obj.spread(a);
        if !(m > ZERO_FLOOR * o.bound) || !obj.feasible(a) {
            return false;
        }
        let xbar = self.xbar();
        let from = |refs: &[Point]| {
            a.omegas
                .iter()
                .zip(refs)
                .map(|(w, r)| self.dist(w, r))
                .fold(0.0, f64::max)
        };
        let from_xbar = a
            .omegas
            .iter()
            .map(|w| self.dist(w, xbar))
            .fold(0.0, f64::max);
        let capped = m <= o.bound * (1.0 + 1e-12);
        match (q.rule, self.property) {
            (AnchorRule::Theorem, _) => {
                self.dist(&a.x, &o.x_ref) < lam && from(&o.reference) < lam / gamma && capped
            }
            (AnchorRule::Simplified, Property::Semi) => {
                self.dist(&a.x, xbar) < d1 && from_xbar < d1 / gamma && capped
            }
            (AnchorRule::Simplified, Property::Sub) => {
                self.dist(&a.x, xbar) < d1 + d2
                    && from_xbar < d2 + d1 / gamma + self.r1
                    && m < self.r1
            }
            (AnchorRule::Simplified, Property::Full) => {
                self.dist(&a.x, xbar) < d1 && from_xbar < d2 + d1 / gamma && m < self.r1
            }
            (AnchorRule::DeltaFree, Property::Semi) => {
                self.dist(&a.x, xbar) < d1 && from_xbar < d1 && capped
            }
            (AnchorRule::DeltaFree, _) => self.dist(&a.x, xbar) < d1 && from_xbar < d1,
        }
    }

    /// A random anchor: either a perturbation of a descent iterate or a point
    /// built around the reference whose set components sit within (or, half
    /// the time, at) the admissible spread from the shifted free point.
    fn random_anchor(
        &self,
        obj: &CoupledObjective,
        o: &Outer,
        lam: f64,
        path: &[Config],
        rng: &mut ChaCha8Rng,
    ) -> Config {
        let norm = self.scene.norm;
        let d = self.scene.dimension;
        let project = |i: usize, p: &Point| obj.sets[i].project_unchecked(p, norm);
        if rng.gen_bool(0.5) {
            let base = &path[rng.gen_range(0..path.len())];
            let r = log_uniform(rng, 1e-4, 1.0) * lam;
            let x = add(&base.x, &at_radius(rng, d, r, norm));
            let omegas = (0..obj.n())
                .map(|i| {
                    project(
                        i,
                        &add(&base.omegas[i], &at_radius(rng, d, r / obj.gamma, norm)),
                    )
                })
                .collect();
            return Config { omegas, x };
        }
        let center = match self.q.rule {
            AnchorRule::Theorem => o.x_ref.clone(),
            _ => self.xbar().clone(),
        };
        let x = uniform_in_ball(rng, &center, self.x_radius(lam) * (1.0 - 1e-9), norm);
        let on_sphere: bool = rng.gen();
        let omegas = (0..obj.n())
            .map(|i| {
                let target = match o.shifts.get(i) {
                    Some(s) => add(&x, s),
                    None => x.clone(),
                };
                let e = if on_sphere {
                    at_radius(rng, d, o.bound, norm)
                } else {
                    sub(&uniform_in_ball(rng, &target, o.bound, norm), &target)
                };
                project(i, &add(&target, &e))
            })
            .collect();
        Config { omegas, x }
    }
}

/// Ekeland descent on the sampled moves: step to the move minimizing
/// `f̂(c) + rate·d_γ(c, current)` while that is below `f̂(current)`.
fn descend(
    obj: &CoupledObjective,
    moves: &Moves,
    start: &Config,
    rate: f64,
    rng: &mut ChaCha8Rng,
) -> Vec<Config> {
    let mut path = vec![start.clone()];
    let mut cur = start.clone();
    let mut fc = obj.value(&cur);
    for _ in 0..DESCENT_STEPS {
        if !(fc > 0.0) {
            break;
        }
        let best = moves
            .candidates(&cur, rng, DESCENT_MOVES)
            .into_iter()
            .map(|c| {
                let v = obj.value(&c) + rate * obj.dist(&c, &cur);
                (c, v)
            })
            .filter(|(_, v)| v.is_finite())
            .min_by(|a, b| a.1.total_cmp(&b.1));
        match best {
            Some((c, v)) if v < fc => {
                fc = obj.value(&c);
                cur = c;
                path.push(cur.clone());
            }
            _ => break,
        }
    }
    path
}

struct Assessment {
    slope: f64,
    c1: Option<f64>,
}

fn assess(obj: &CoupledObjective, moves: &Moves, a: &Config, rng: &mut ChaCha8Rng) -> Assessment {
    let cands = moves.candidates(a, rng, SLOPE_MOVES);
    let slope = obj.nonlocal_over(a, &cands);
    let m = obj.spread(a);
    let c1 = (obj.gauge.is_c1() && m > 1e-12)
        .then(|| obj.gauge.derivative(m).ok())
        .flatten()
        .map(|dphi| {
            let rate = cands
                .iter()
                .filter_map(|c| obj.spread_rate(a, c, C1_STEP))
                .fold(0.0, f64::max);
            dphi * rate
        });
    Assessment { slope, c1 }
}

#[derive(Default)]
struct Tally {
    anchors: usize,
    min_slope: f64,
    c1_checked: usize,
    c1_violations: usize,
}

enum OuterResult {
    Vacuous,
    Done(Tally, Option<SlopeWitness>),
}

fn check_outer(ctx: &Ctx, index: u64) -> OuterResult {
    let q = ctx.q;
    let mut rng = stream(q.seed, index);
    let Some(o) = ctx.sample_outer(&mut rng, index) else {
        return OuterResult::Vacuous;
    };
    let obj = CoupledObjective {
        gauge: q.gauge.clone(),
        sets: ctx.scene.sets.clone(),
        shifts: o.shifts.clone(),
        gamma: q.gamma,
        norm: ctx.scene.norm,
    };
    let zeros = ZeroSet::of(&obj, ctx.scene.intersection.as_ref());
    let moves = Moves {
        obj: &obj,
        zeros: &zeros,
    };
    let lams = ctx.lambdas(&o);
    if lams.is_empty() {
        return OuterResult::Vacuous;
    }
    let f0 = obj.value(&o.start);
    let mut tally = Tally {
        min_slope: f64::INFINITY,
        ..Tally::default()
    };
    let mut failing: Vec<(Config, f64, bool)> = Vec::new();
    for &lam in &lams {
        if failing.iter().any(|(a, _, _)| ctx.valid(&obj, &o, lam, a)) {
            continue;
        }
        let eps = 0.5 * (f0 + lam);
        let path = descend(&obj, &moves, &o.start, eps / lam, &mut rng);
        let mut anchors: Vec<(Config, bool)> = path.iter().cloned().map(|c| (c, true)).collect();
        for _ in 0..q.random_anchors {
            anchors.push((ctx.random_anchor(&obj, &o, lam, &path, &mut rng), false));
        }
        let mut found = None;
        for (a, from_descent) in anchors {
            if !ctx.valid(&obj, &o, lam, &a) {
                continue;
            }
            let r = assess(&obj, &moves, &a, &mut rng);
            tally.anchors += 1;
            tally.min_slope = tally.min_slope.min(r.slope);
            if let Some(c1) = r.c1 {
                tally.c1_checked += 1;
                if c1 < 1.0 - SLOPE_TOL {
                    tally.c1_violations += 1;
                }
            }
            if r.slope < 1.0 - SLOPE_TOL {
                found = Some((a, r.slope, from_descent));
                break;
            }
        }
        match found {
            Some(f) => failing.push(f),
            None => return OuterResult::Done(tally, None),
        }
    }
    let (anchor, slope, from_descent) = failing.swap_remove(0);
    let witness = SlopeWitness {
        outer_index: index,
        shifts: o.shifts.clone(),
        reference: Config {
            omegas: o.reference.clone(),
            x: o.x_ref.clone(),
        },
        lambdas: lams,
        value: obj.value(&anchor),
        anchor,
        slope,
        from_descent,
    };
    OuterResult::Done(tally, Some(witness))
}

fn run(scene: &Scene, q: &SlopeConditionQuery, property: Property) -> Result<SlopeCheck> {
    scene.validate()?;
    q.validate()?;
    let ctx = Ctx {
        scene,
        q,
        property,
        r1: q.gauge.inv(q.delta1),
    };
    let mut check = SlopeCheck {
        status: ConditionStatus::ConditionSeenTrue,
        property,
        rule: q.rule,
        gamma: q.gamma,
        outer_samples: 0,
        vacuous: 0,
        anchors_checked: 0,
        min_slope: f64::INFINITY,
        c1_checked: 0,
        c1_violations: 0,
        tol: SLOPE_TOL,
        witness: None,
    };
    let mut start = 0;
    while start < q.budget && check.witness.is_none() {
        let end = (start + CHUNK).min(q.budget);
        let results: Vec<OuterResult> = (start..end)
            .into_par_iter()
            .map(|i| check_outer(&ctx, i as u64))
            .collect();
        for r in results {
            check.outer_samples += 1;
            match r {
                OuterResult::Vacuous => check.vacuous += 1,
                OuterResult::Done(t, w) => {
                    check.anchors_checked += t.anchors;
                    check.min_slope = check.min_slope.min(t.min_slope);
                    check.c1_checked += t.c1_checked;
                    check.c1_violations += t.c1_violations;
                    if w.is_some() {
                        check.witness = w;
                        check.status = ConditionStatus::ConditionSeenFalse;
                        break;
                    }
                }
            }
        }
        start = end;
    }
    Ok(check)
}

/// Slope condition for semitransversality with `δ = delta1`.
pub fn check_semi_slope_condition(scene: &Scene, q: &SlopeConditionQuery) -> Result<SlopeCheck> {
    run(scene, q, Property::Semi)
}

/// Slope condition for subtransversality; the objective has zero shifts.
pub fn check_sub_slope_condition(scene: &Scene, q: &SlopeConditionQuery) -> Result<SlopeCheck> {
    run(scene, q, Property::Sub)
}

/// Slope condition for transversality; shifts are built from reference
/// anchors `ω′ᵢ` and offsets of largest norm `ξ`.
pub fn check_full_slope_condition(scene: &Scene, q: &SlopeConditionQuery) -> Result<SlopeCheck> {
    run(scene, q, Property::Full)
}
