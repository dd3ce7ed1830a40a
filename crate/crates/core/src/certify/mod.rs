//! Three-valued certifiers for semitransversality, subtransversality and
//! transversality of a scene under a gauge φ.
//!
//! Every property is checked through one of its metric forms: an inequality
//! `d(p, ⋂(Ωᵢ − sᵢ)) ≤ φ(a)` whose point `p`, shifts `sᵢ` and argument `a`
//! are built from a sampled perturbation (see [`Form`]). Each sample is
//! evaluated soundly:
//!
//! * the largest single-set distance is a lower bound for the left side, so
//!   exceeding `φ(a) + tol` falsifies;
//! * the best feasible point found gives an upper bound, so staying below
//!   `φ(a) + tol` confirms the sample;
//! * otherwise a branch-and-bound search over the ball of radius
//!   `φ(a) + tol` either finds a feasible point or proves there is none.
//!
//! Samples are drawn from per-index random streams and reduced in index order,
//! so verdicts do not depend on the number of worker threads.

mod forms;
mod modulus;
mod restricted;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::gauges::Gauge;
use crate::geometry::{NormSpec, Point};
use crate::json::ext_f64;
use crate::rng::stream;
use crate::sets::intersection::{bounds_unchecked, separation, Separation};
use crate::sets::{Exactness, Scene, SetOracle};

pub use forms::Form;
pub(crate) use forms::{anchor, radius, shift_tuple, test_point};
pub(crate) use modulus::bracket_modulus;
pub use modulus::{
    estimate_modulus, necessary_gauge_check, GaugeCheck, ModulusEstimate, ModulusOptions,
};
pub use restricted::{
    certify_one_sided, certify_restricted, witness_reduction_equivalence, Implied, ReductionReport,
    Restricted, RestrictedQuery, RestrictedReport,
};

/// Inequality tolerance on scenes with closed-form distances.
pub const TOL_ANALYTIC: f64 = 1e-9;
/// Inequality tolerance when some distance is computed iteratively.
pub const TOL_ITERATIVE: f64 = 1e-6;
/// Smallest sampled magnitude relative to the admissible scale.
pub const R_MIN: f64 = 1e-6;

const CHUNK: usize = 64;
const SEPARATION_CELLS: usize = 20_000;
const RESTARTS: usize = 8;

pub fn tolerance(e: Exactness) -> f64 {
    match e {
        Exactness::Analytic => TOL_ANALYTIC,
        Exactness::Iterative => TOL_ITERATIVE,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Property {
    Semi,
    Sub,
    Full,
}

impl Property {
    pub fn form(self) -> Form {
        match self {
            Property::Semi => Form::Semi,
            Property::Sub => Form::Sub,
            Property::Full => Form::Full,
        }
    }
}

impl std::str::FromStr for Property {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "semi" => Ok(Property::Semi),
            "sub" => Ok(Property::Sub),
            "full" => Ok(Property::Full),
            other => Err(invalid(format!("unknown property {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropertyQuery {
    pub property: Property,
    pub gauge: Gauge,
    /// δ for semitransversality, δ₁ otherwise.
    pub delta1: f64,
    /// δ₂; ignored for semitransversality.
    #[serde(default)]
    pub delta2: Option<f64>,
    pub budget: usize,
    #[serde(default)]
    pub seed: u64,
}

impl PropertyQuery {
    pub fn semi(gauge: Gauge, delta: f64) -> Self {
        PropertyQuery {
            property: Property::Semi,
            gauge,
            delta1: delta,
            delta2: None,
            budget: 1000,
            seed: 0,
        }
    }

    pub fn sub(gauge: Gauge, delta1: f64, delta2: f64) -> Self {
        PropertyQuery {
            property: Property::Sub,
            delta2: Some(delta2),
            ..PropertyQuery::semi(gauge, delta1)
        }
    }

    pub fn full(gauge: Gauge, delta1: f64, delta2: f64) -> Self {
        PropertyQuery {
            property: Property::Full,
            ..PropertyQuery::sub(gauge, delta1, delta2)
        }
    }

    pub fn new(property: Property, gauge: Gauge, delta1: f64, delta2: f64) -> Self {
        PropertyQuery {
            property,
            ..PropertyQuery::sub(gauge, delta1, delta2)
        }
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn delta2(&self) -> f64 {
        self.delta2.unwrap_or(self.delta1)
    }

    pub fn validate(&self) -> Result<()> {
        self.gauge.validate()?;
        if !(self.delta1 > 0.0) || !(self.delta2() > 0.0) {
            return Err(invalid("deltas must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    HoldsOnSamples,
    Falsified,
    Inconclusive,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::HoldsOnSamples => 0,
            Status::Falsified => 1,
            Status::Inconclusive => 2,
        }
    }
}

/// Raw perturbation data of one sample; which fields are used depends on the form.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Raw {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub shifts: Vec<Point>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub anchors: Vec<Point>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<Point>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Certificate {
    /// A single shifted set is already farther than the gauge value.
    PerSet,
    /// Branch and bound showed the intersection misses the gauge ball.
    Separation,
    /// The left side was computed in closed form, or by complete planar
    /// enumeration of the intersection candidates.
    Exact,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub form: Form,
    pub index: u64,
    pub raw: Raw,
    /// Gauge argument `a`.
    pub arg: f64,
    /// `φ(a)`.
    pub rhs: f64,
    /// Certified lower bound on the left side.
    #[serde(with = "ext_f64")]
    pub lower: f64,
    pub certificate: Certificate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: Status,
    pub form: Form,
    pub samples_evaluated: usize,
    pub skipped: usize,
    pub inconclusive_count: usize,
    /// Minimum over evaluated samples of `φ(a) − d`, with `d` the upper bound
    /// for confirmed samples and the certified lower bound for the witness.
    #[serde(with = "ext_f64")]
    pub min_margin: f64,
    pub tol: f64,
    /// Counts of evaluated margins per bin of [`margin_bins`].
    pub margin_histogram: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

const MARGIN_DECADES: i32 = 12;

/// Histogram bin labels: negative margins, `[0, 1e-12)`, one bin per decade
/// up to 1, and `[1, ∞)`.
pub fn margin_bins() -> Vec<String> {
    let mut out = vec!["<0".to_string(), format!("[0,1e-{MARGIN_DECADES})")];
    for k in (1..=MARGIN_DECADES).rev() {
        out.push(format!("[1e-{k},1e-{})", k - 1).replace("1e-0", "1"));
    }
    out.push("[1,inf)".to_string());
    out
}

fn margin_bin(m: f64) -> usize {
    if m < 0.0 {
        0
    } else if m < 10f64.powi(-MARGIN_DECADES) {
        1
    } else if m >= 1.0 {
        MARGIN_DECADES as usize + 2
    } else {
        let k = (-m.log10()).ceil().clamp(1.0, MARGIN_DECADES as f64) as usize;
        MARGIN_DECADES as usize + 2 - k
    }
}

/// Left side of a metric inequality.
#[derive(Clone)]
pub(crate) enum Lhs {
    /// `d(point, ⋂ sets)`
    Intersection { sets: Vec<SetOracle>, point: Point },
    /// Closed-form value.
    Exact(f64),
}

pub(crate) struct Probe {
    pub lhs: Lhs,
    pub arg: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Outcome {
    Holds { margin: f64 },
    Falsified { lower: f64, cert: Certificate },
    Inconclusive { margin: f64 },
}

impl Outcome {
    pub(crate) fn margin(&self, rhs: f64) -> f64 {
        match *self {
            Outcome::Holds { margin } | Outcome::Inconclusive { margin } => margin,
            Outcome::Falsified { lower, .. } => rhs - lower,
        }
    }
}

pub(crate) fn sample_seed(seed: u64, index: u64) -> u64 {
    seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15).rotate_left(17)
}

/// Evaluate one probe soundly against `rhs = φ(arg)`.
pub(crate) fn evaluate(
    probe: &Probe,
    gauge: &Gauge,
    tol: f64,
    norm: NormSpec,
    seed: u64,
) -> (f64, Outcome) {
    let rhs = gauge.at(probe.arg);
    let out = match &probe.lhs {
        Lhs::Exact(v) => {
            if *v > rhs + tol {
                Outcome::Falsified {
                    lower: *v,
                    cert: Certificate::Exact,
                }
            } else {
                Outcome::Holds { margin: rhs - v }
            }
        }
        Lhs::Intersection { sets, point } => {
            let b = bounds_unchecked(sets, point, norm, RESTARTS, seed);
            if b.lower > rhs + tol {
                let per_set = sets.iter().any(|s| s.d(point, norm) > rhs + tol);
                Outcome::Falsified {
                    lower: b.lower,
                    cert: if per_set {
                        Certificate::PerSet
                    } else {
                        Certificate::Exact
                    },
                }
            } else if b.upper <= rhs + tol {
                Outcome::Holds {
                    margin: rhs - b.upper,
                }
            } else if b.exact {
                Outcome::Falsified {
                    lower: b.upper,
                    cert: Certificate::Exact,
                }
            } else {
                match separation(sets, point, rhs + tol, norm, SEPARATION_CELLS) {
                    Separation::Separated => Outcome::Falsified {
                        lower: rhs + tol,
                        cert: Certificate::Separation,
                    },
                    Separation::Feasible(p) => Outcome::Holds {
                        margin: rhs - norm.dist(&p, point),
                    },
                    Separation::Unknown => Outcome::Inconclusive {
                        margin: rhs - b.upper,
                    },
                }
            }
        }
    };
    (rhs, out)
}

pub(crate) enum Sample {
    Skip,
    Eval {
        raw: Raw,
        arg: f64,
        rhs: f64,
        outcome: Outcome,
    },
}

/// Run `budget` samples in fixed chunks, reducing in index order and stopping
/// after the chunk that contains the first falsification.
pub(crate) fn run_samples<F>(form: Form, budget: usize, tol: f64, draw: F) -> Verdict
where
    F: Fn(u64) -> Sample + Sync,
{
    let mut v = Verdict {
        status: Status::HoldsOnSamples,
        form,
        samples_evaluated: 0,
        skipped: 0,
        inconclusive_count: 0,
        min_margin: f64::INFINITY,
        tol,
        margin_histogram: vec![0; MARGIN_DECADES as usize + 3],
        witness: None,
    };
    let mut start = 0usize;
    while start < budget && v.witness.is_none() {
        let end = (start + CHUNK).min(budget);
        let results: Vec<Sample> = (start..end)
            .into_par_iter()
            .map(|i| draw(i as u64))
            .collect();
        for (k, s) in results.into_iter().enumerate() {
            match s {
                Sample::Skip => v.skipped += 1,
                Sample::Eval {
                    raw,
                    arg,
                    rhs,
                    outcome,
                } => {
                    v.samples_evaluated += 1;
                    let m = outcome.margin(rhs);
                    v.min_margin = v.min_margin.min(m);
                    v.margin_histogram[margin_bin(m)] += 1;
                    match outcome {
                        Outcome::Holds { .. } => {}
                        Outcome::Inconclusive { .. } => v.inconclusive_count += 1,
                        Outcome::Falsified { lower, cert } => {
                            v.witness = Some(Witness {
                                form,
                                index: (start + k) as u64,
                                raw,
                                arg,
                                rhs,
                                lower,
                                certificate: cert,
                            });
                            break;
                        }
                    }
                }
            }
        }
        start = end;
    }
    v.status = if v.witness.is_some() {
        Status::Falsified
    } else if v.inconclusive_count > 0 {
        Status::Inconclusive
    } else {
        Status::HoldsOnSamples
    };
    v
}

fn scene_tol(scene: &Scene) -> f64 {
    tolerance(scene.exactness())
}

/// Certify the metric form `form` of a scene. The query supplies the gauge,
/// the deltas (δ₁ doubles as `t̄` for the restricted forms), budget and seed.
pub fn certify_form(scene: &Scene, form: Form, q: &PropertyQuery) -> Result<Verdict> {
    q.validate()?;
    scene.validate()?;
    form.check_scene(scene)?;
    let tol = scene_tol(scene);
    let dom = forms::Domain::of(q);
    Ok(run_samples(form, q.budget, tol, |i| {
        let mut rng = stream(q.seed, i);
        let raw = form.sample(scene, &dom, &mut rng);
        match form.build(scene, &dom, &raw) {
            Some(probe) => {
                let (rhs, outcome) =
                    evaluate(&probe, &q.gauge, tol, scene.norm, sample_seed(q.seed, i));
                Sample::Eval {
                    raw,
                    arg: probe.arg,
                    rhs,
                    outcome,
                }
            }
            None => Sample::Skip,
        }
    }))
}

/// Evaluate a single candidate configuration under `q`, returning a witness
/// when it falsifies the property inside the query's domain.
pub(crate) fn witness_for(
    scene: &Scene,
    q: &PropertyQuery,
    raw: Raw,
    index: u64,
) -> Result<Option<Witness>> {
    q.validate()?;
    scene.validate()?;
    let form = q.property.form();
    form.check_scene(scene)?;
    let tol = scene_tol(scene);
    let dom = forms::Domain::of(q);
    let Some(probe) = form.build(scene, &dom, &raw) else {
        return Ok(None);
    };
    let (rhs, outcome) = evaluate(
        &probe,
        &q.gauge,
        tol,
        scene.norm,
        sample_seed(q.seed, index),
    );
    Ok(match outcome {
        Outcome::Falsified { lower, cert } => Some(Witness {
            form,
            index,
            raw,
            arg: probe.arg,
            rhs,
            lower,
            certificate: cert,
        }),
        _ => None,
    })
}

fn expect(q: &PropertyQuery, p: Property) -> Result<()> {
    if q.property != p {
        return Err(invalid(format!(
            "expected a {p:?} query, got {:?}",
            q.property
        )));
    }
    Ok(())
}

pub fn certify_semi(scene: &Scene, q: &PropertyQuery) -> Result<Verdict> {
    expect(q, Property::Semi)?;
    certify_form(scene, Form::Semi, q)
}

pub fn certify_sub(scene: &Scene, q: &PropertyQuery) -> Result<Verdict> {
    expect(q, Property::Sub)?;
    certify_form(scene, Form::Sub, q)
}

pub fn certify_full(scene: &Scene, q: &PropertyQuery) -> Result<Verdict> {
    expect(q, Property::Full)?;
    certify_form(scene, Form::Full, q)
}

pub fn certify(scene: &Scene, q: &PropertyQuery) -> Result<Verdict> {
    certify_form(scene, q.property.form(), q)
}

/// Re-derive a witness from its raw data and confirm the violation from
/// scratch, using only single-set distances.
pub fn recheck(scene: &Scene, q: &PropertyQuery, w: &Witness) -> Result<bool> {
    scene.validate()?;
    w.form.check_scene(scene)?;
    let dom = forms::Domain::of(q);
    let tol = scene_tol(scene);
    let Some(probe) = w.form.build(scene, &dom, &w.raw) else {
        return Ok(false);
    };
    Ok(confirms_violation(
        &probe.lhs,
        q.gauge.at(probe.arg),
        tol,
        scene.norm,
    ))
}

/// Whether `lhs > rhs + tol` follows from single-set distances or a
/// separation certificate alone.
pub(crate) fn confirms_violation(lhs: &Lhs, rhs: f64, tol: f64, norm: NormSpec) -> bool {
    match lhs {
        Lhs::Exact(v) => *v > rhs + tol,
        Lhs::Intersection { sets, point } => {
            let lower = sets.iter().map(|s| s.d(point, norm)).fold(0.0, f64::max);
            if lower > rhs + tol {
                return true;
            }
            let b = bounds_unchecked(sets, point, norm, RESTARTS, 0);
            b.lower > rhs + tol
                || (b.exact && b.upper > rhs + tol)
                || separation(sets, point, rhs + tol, norm, SEPARATION_CELLS)
                    == Separation::Separated
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FullVariants {
    /// Anchored shifts with `ωᵢ + xᵢ ∈ B_δ₂(x̄)`.
    pub anchored: Verdict,
    /// Shifted sets measured at the reference point.
    pub shifted_base: Verdict,
    /// Shifted sets measured at a free point.
    pub shifted_point: Verdict,
    /// Parameters `(δ′₁, δ′₂)` with `φ⁻¹(δ′₁) + δ′₂ = δ₂`, when `δ₂` leaves room.
    pub translated: Option<(f64, f64)>,
}

impl FullVariants {
    pub fn statuses(&self) -> [Status; 3] {
        [
            self.anchored.status,
            self.shifted_base.status,
            self.shifted_point.status,
        ]
    }
}

/// Evaluate the three equivalent transversality forms on shared sample streams.
pub fn certify_full_variants(scene: &Scene, q: &PropertyQuery) -> Result<FullVariants> {
    expect(q, Property::Full)?;
    let translated = translate_deltas(&q.gauge, q.delta1, q.delta2());
    Ok(FullVariants {
        anchored: certify_form(scene, Form::FullAnchorSum, q)?,
        shifted_base: certify_form(scene, Form::ShiftedBase, q)?,
        shifted_point: certify_form(scene, Form::ShiftedPoint, q)?,
        translated,
    })
}

/// `(δ₁, δ₂ − φ⁻¹(δ₁))` when the second entry is positive.
pub fn translate_deltas(gauge: &Gauge, delta1: f64, delta2: f64) -> Option<(f64, f64)> {
    let d2 = delta2 - gauge.inv(delta1);
    (d2 > 0.0).then_some((delta1, d2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn axes() -> Scene {
        Scene::new(
            NormSpec::Max,
            vec![0.0, 0.0],
            vec![
                SetOracle::line(vec![0.0, 0.0], vec![1.0, 0.0]),
                SetOracle::line(vec![0.0, 0.0], vec![0.0, 1.0]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn axes_sub_holds_at_modulus_one() {
        let q = PropertyQuery::sub(Gauge::linear(1.0).unwrap(), 1.0, 1.0).with_budget(500);
        let v = certify_sub(&axes(), &q).unwrap();
        assert_eq!(v.status, Status::HoldsOnSamples, "{v:?}");
        assert!(v.min_margin.abs() < 1e-12);
    }

    #[test]
    fn axes_sub_falsified_above_one() {
        let q = PropertyQuery::sub(Gauge::linear(1.5).unwrap(), 1.0, 1.0).with_budget(500);
        let v = certify_sub(&axes(), &q).unwrap();
        assert_eq!(v.status, Status::Falsified);
        assert!(recheck(&axes(), &q, v.witness.as_ref().unwrap()).unwrap());
    }

    #[test]
    fn deterministic_replay() {
        let q = PropertyQuery::semi(Gauge::linear(0.7).unwrap(), 1.0)
            .with_budget(300)
            .with_seed(9);
        let a = certify_semi(&axes(), &q).unwrap();
        let b = certify_semi(&axes(), &q).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn margin_bins_cover_the_line() {
        assert_eq!(margin_bins().len(), MARGIN_DECADES as usize + 3);
        assert_eq!(margin_bin(-1.0), 0);
        assert_eq!(margin_bin(0.0), 1);
        assert_eq!(margin_bin(0.5), MARGIN_DECADES as usize + 1);
        assert_eq!(margin_bin(2.0), MARGIN_DECADES as usize + 2);
        assert_eq!(margin_bin(2e-12), 2);
    }

    #[test]
    fn translated_deltas() {
        let g = Gauge::linear(1.0).unwrap();
        assert_eq!(translate_deltas(&g, 0.25, 1.0), Some((0.25, 0.75)));
        assert_eq!(translate_deltas(&g, 2.0, 1.0), None);
    }
}
