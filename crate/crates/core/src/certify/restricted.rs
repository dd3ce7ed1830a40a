//! Restricted metric conditions for pairs of sets, one-sided necessary
//! checks, and the anchored reformulation of the subtransversality
//! inequality.

use serde::{Deserialize, Serialize};

use super::{certify_form, scene_tol, Form, Property, PropertyQuery, Status, Verdict, RESTARTS};
use crate::error::{invalid, Error, Result};
use crate::gauges::Gauge;
use crate::geometry::{check_dim, NormSpec, Point};
use crate::json::ext_f64;
use crate::rng::{at_radius, log_uniform, stream};
use crate::sets::intersection::bounds_unchecked;
use crate::sets::Scene;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Restricted {
    /// Shift only the first set, evaluate at the reference point.
    Semi,
    /// Test points restricted to the second set.
    Sub,
    /// Anchors on both sets, shift only the first.
    Full,
}

impl Restricted {
    fn form(self) -> Form {
        match self {
            Restricted::Semi => Form::RestrictedSemi,
            Restricted::Sub => Form::RestrictedSub,
            Restricted::Full => Form::RestrictedFull,
        }
    }

    fn property(self) -> Property {
        match self {
            Restricted::Semi => Property::Semi,
            Restricted::Sub => Property::Sub,
            Restricted::Full => Property::Full,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RestrictedQuery {
    pub which: Restricted,
    /// Premise gauge; must satisfy `φ(t) ≤ α·t` on `]0, t̄]`.
    pub gauge: Gauge,
    pub alpha: f64,
    pub t_bar: f64,
    /// δ₂ of the sub and full premises.
    #[serde(default)]
    pub delta2: Option<f64>,
    pub budget: usize,
    #[serde(default)]
    pub seed: u64,
}

impl RestrictedQuery {
    /// Premise with the linear gauge `φ(t) = α·t`.
    pub fn linear(which: Restricted, alpha: f64, t_bar: f64) -> Result<Self> {
        Ok(RestrictedQuery {
            which,
            gauge: Gauge::linear(1.0 / alpha)?,
            alpha,
            t_bar,
            delta2: None,
            budget: 1000,
            seed: 0,
        })
    }

    pub fn with_delta2(mut self, d2: f64) -> Self {
        self.delta2 = Some(d2);
        self
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn delta2(&self) -> f64 {
        self.delta2.unwrap_or(self.t_bar)
    }
}

/// The property a holding premise implies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Implied {
    pub property: Property,
    /// `α′ = 1/(1 + 2α)`
    pub alpha_prime: f64,
    /// `(α + ½)·t̄`
    pub delta1: f64,
    pub delta2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestrictedReport {
    pub which: Restricted,
    pub premise: Verdict,
    pub implied: Implied,
    /// Direct certification of the implied property, run when the premise holds.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conclusion: Option<Verdict>,
    /// False when the premise held but the implied property was falsified.
    pub consistent: bool,
}

/// Scan `φ(t) ≤ α·t` on a log grid of `]0, t̄]`.
fn bounded_by_linear(gauge: &Gauge, alpha: f64, t_bar: f64) -> Option<f64> {
    (0..=400)
        .map(|k| t_bar * 10f64.powf(-12.0 * k as f64 / 400.0))
        .find(|&t| gauge.at(t) > alpha * t * (1.0 + 1e-12))
}

/// Certify a restricted premise on a two-set scene and, when it holds,
/// cross-check the implied `α′`-property with the direct certifier.
pub fn certify_restricted(scene: &Scene, rq: &RestrictedQuery) -> Result<RestrictedReport> {
    if !(rq.alpha > 0.0 && rq.t_bar > 0.0 && rq.delta2() > 0.0) {
        return Err(invalid("α, t̄ and δ₂ must be positive"));
    }
    if let Some(t) = bounded_by_linear(&rq.gauge, rq.alpha, rq.t_bar) {
        return Err(Error::PremiseViolated(format!(
            "gauge exceeds {}·t at t = {t:e}",
            rq.alpha
        )));
    }
    let premise_query =
        PropertyQuery::new(rq.which.property(), rq.gauge.clone(), rq.t_bar, rq.delta2())
            .with_budget(rq.budget)
            .with_seed(rq.seed);
    let premise = certify_form(scene, rq.which.form(), &premise_query)?;
    let alpha_prime = 1.0 / (1.0 + 2.0 * rq.alpha);
    let implied = Implied {
        property: rq.which.property(),
        alpha_prime,
        delta1: (rq.alpha + 0.5) * rq.t_bar,
        delta2: rq.delta2(),
    };
    let conclusion = if premise.status == Status::HoldsOnSamples {
        let q = PropertyQuery::new(
            implied.property,
            Gauge::linear(alpha_prime)?,
            implied.delta1,
            implied.delta2,
        )
        .with_budget(rq.budget)
        .with_seed(rq.seed);
        Some(certify_form(scene, implied.property.form(), &q)?)
    } else {
        None
    };
    let consistent = conclusion
        .as_ref()
        .is_none_or(|v| v.status != Status::Falsified);
    Ok(RestrictedReport {
        which: rq.which,
        premise,
        implied,
        conclusion,
        consistent,
    })
}

/// One-sided necessary condition of a property: all but the last set are
/// perturbed (or, for subtransversality, test points lie on the last set).
/// A falsification here falsifies the property itself.
pub fn certify_one_sided(scene: &Scene, q: &PropertyQuery) -> Result<Verdict> {
    let form = match q.property {
        Property::Semi => Form::OneSidedSemi,
        Property::Sub => Form::OneSidedSub,
        Property::Full => Form::OneSidedFull,
    };
    certify_form(scene, form, q)
}

/// Comparison of the subtransversality inequality at one point with its
/// anchored reformulations over sampled anchor tuples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionReport {
    /// Bounds on `d(x, ⋂Ωᵢ)`.
    pub lower: f64,
    #[serde(with = "ext_f64")]
    pub upper: f64,
    /// `d(x, ⋂Ωᵢ) ≤ φ(maxᵢ d(x, Ωᵢ))`; `None` when the bounds straddle the gauge value.
    pub direct: Option<bool>,
    /// The anchored inequality over all sampled anchor tuples.
    pub anchored: Option<bool>,
    /// Anchors with `‖ωᵢ − x̄‖ < ‖x − x̄‖ + φ⁻¹(‖x − x̄‖)`.
    pub near_base: Option<bool>,
    /// Anchors with `φ(‖ωᵢ − x‖) < ‖x − x̄‖`.
    pub near_point: Option<bool>,
    pub tuples: usize,
    /// All decided conditions agree.
    pub agree: bool,
}

/// Three-valued `L ≤ φ(a) + tol` given bounds on `L`.
fn decide(lower: f64, upper: f64, rhs: f64, tol: f64) -> Option<bool> {
    if lower > rhs + tol {
        Some(false)
    } else if upper <= rhs + tol {
        Some(true)
    } else {
        None
    }
}

/// Conjunction of three-valued results.
fn all(values: impl Iterator<Item = Option<bool>>) -> Option<bool> {
    let mut out = Some(true);
    for v in values {
        match v {
            Some(false) => return Some(false),
            None => out = None,
            Some(true) => {}
        }
    }
    out
}

/// Evaluate the direct and anchored forms of the subtransversality
/// inequality at `x ∉ ⋂Ωᵢ`. Anchor tuples include the nearest points of each
/// set, so exact agreement is expected.
pub fn witness_reduction_equivalence(
    scene: &Scene,
    x: &[f64],
    gauge: &Gauge,
    budget: usize,
    seed: u64,
) -> Result<ReductionReport> {
    scene.validate()?;
    gauge.validate()?;
    check_dim(scene.dimension, x)?;
    let norm = scene.norm;
    let tol = scene_tol(scene);
    let (lower, upper) = match &scene.intersection {
        Some(inter) => {
            let v = inter.d(x, norm);
            (v, v)
        }
        None => {
            let b = bounds_unchecked(&scene.sets, x, norm, RESTARTS, seed);
            (if b.exact { b.upper } else { b.lower }, b.upper)
        }
    };
    if upper <= tol {
        return Err(invalid("point lies in the intersection"));
    }
    let direct = decide(lower, upper, gauge.at(scene.max_dist(x)), tol);

    let gap = norm.dist(x, &scene.basepoint);
    let base_radius = gap + gauge.inv(gap);
    let tuples = anchor_tuples(scene, x, budget, seed, norm);
    let mut anchored = Vec::new();
    let mut near_base = Vec::new();
    let mut near_point = Vec::new();
    for t in &tuples {
        let spread = t.iter().map(|w| norm.dist(x, w)).fold(0.0, f64::max);
        let v = decide(lower, upper, gauge.at(spread), tol);
        anchored.push(v);
        if t.iter()
            .all(|w| norm.dist(w, &scene.basepoint) < base_radius)
        {
            near_base.push(v);
        }
        if t.iter().all(|w| gauge.at(norm.dist(w, x)) < gap) {
            near_point.push(v);
        }
    }
    let anchored = all(anchored.into_iter());
    let near_base = all(near_base.into_iter());
    let near_point = all(near_point.into_iter());
    let decided: Vec<bool> = [direct, anchored, near_base, near_point]
        .into_iter()
        .flatten()
        .collect();
    let agree = decided.windows(2).all(|w| w[0] == w[1]);
    Ok(ReductionReport {
        lower,
        upper,
        direct,
        anchored,
        near_base,
        near_point,
        tuples: tuples.len(),
        agree,
    })
}

/// Nearest-point tuple, the reference point, and projections of random
/// perturbations of `x` at log-uniform radii.
fn anchor_tuples(
    scene: &Scene,
    x: &[f64],
    budget: usize,
    seed: u64,
    norm: NormSpec,
) -> Vec<Vec<Point>> {
    let sets = &scene.sets;
    let mut out = vec![
        sets.iter().map(|s| s.project_unchecked(x, norm)).collect(),
        vec![scene.basepoint.clone(); sets.len()],
    ];
    let scale = 4.0 * norm.dist(x, &scene.basepoint).max(scene.max_dist(x));
    for i in 0..budget {
        let mut rng = stream(seed, i as u64);
        let tuple = sets
            .iter()
            .map(|s| {
                let r = log_uniform(&mut rng, 1e-6 * scale, scale);
                let u: Point = x
                    .iter()
                    .zip(at_radius(&mut rng, x.len(), r, norm))
                    .map(|(a, b)| a + b)
                    .collect();
                s.project_unchecked(&u, norm)
            })
            .collect();
        out.push(tuple);
    }
    out
}
