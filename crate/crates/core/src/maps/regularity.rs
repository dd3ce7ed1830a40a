//! Sampled certifiers for semiregularity, subregularity and regularity of a
//! mapping, sharing the sample streams, sound evaluation and index-ordered
//! reduction of the set certifiers.
//!
//! The gauge argument `d(y, F(x))` is exact for closed forms and products
//! of translates and a bound pair for graphs. A sample confirms with the
//! lower bound and falsifies with the upper one. When neither happens, the
//! sample is inconclusive.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{GraphPoint, MappingOracle};
use crate::certify::{
    bracket_modulus, confirms_violation, evaluate, radius, run_samples, sample_seed, shift_tuple,
    test_point, Form, Lhs, ModulusEstimate, ModulusOptions, Outcome, Probe, Property,
    PropertyQuery, Raw, Sample, Status, Verdict, Witness,
};
use crate::error::{invalid, Result};
use crate::gauges::Gauge;
use crate::geometry::{add, NormSpec, Point};
use crate::rng::{at_radius, stream};
use crate::sets::Scene;

fn form_of(property: Property) -> Form {
    match property {
        Property::Semi => Form::MapSemi,
        Property::Sub => Form::MapSub,
        Property::Full => Form::MapRegular,
    }
}

struct Sampler<'a> {
    f: &'a MappingOracle,
    base: &'a GraphPoint,
    gauge: &'a Gauge,
    delta1: f64,
    delta2: f64,
    r1: f64,
    /// The product scene re-based at `x̄`, for test points near the sets.
    scene: Option<Scene>,
}

fn offset(y: &[Point], by: &[Point]) -> Vec<Point> {
    y.iter().zip(by).map(|(a, b)| add(a, b)).collect()
}

impl<'a> Sampler<'a> {
    fn new(f: &'a MappingOracle, base: &'a GraphPoint, q: &'a PropertyQuery) -> Self {
        let scene = match f {
            MappingOracle::ProductOfTranslates { scene } => {
                let mut s = scene.clone();
                s.basepoint = base.x.clone();
                Some(s)
            }
            _ => None,
        };
        Sampler {
            f,
            base,
            gauge: &q.gauge,
            delta1: q.delta1,
            delta2: q.delta2(),
            r1: q.gauge.inv(q.delta1),
            scene,
        }
    }

    fn below_delta1(&self, arg: f64) -> bool {
        self.gauge.at(arg) < self.delta1
    }

    fn scale(&self, rng: &mut ChaCha8Rng) -> f64 {
        if rng.gen_bool(0.5) {
            self.delta2
        } else {
            self.delta2.min(self.r1)
        }
    }

    /// A perturbation of `Y` with norm exactly `r`.
    fn perturbation(&self, rng: &mut ChaCha8Rng, r: f64) -> Vec<Point> {
        let (n, d) = self.f.blocks();
        match self.f {
            MappingOracle::ProductOfTranslates { .. } => shift_tuple(rng, n, d, r, self.f.norm()),
            _ => vec![at_radius(rng, d, r, NormSpec::Max)],
        }
    }

    fn point(&self, rng: &mut ChaCha8Rng, hi: f64) -> Point {
        match &self.scene {
            Some(scene) => test_point(rng, scene, hi),
            None => {
                let r = radius(rng, hi);
                add(
                    &self.base.x,
                    &at_radius(rng, self.base.x.len(), r, NormSpec::Max),
                )
            }
        }
    }

    fn sample(&self, form: Form, rng: &mut ChaCha8Rng) -> Raw {
        let xb = &self.base.x;
        let yb = &self.base.y;
        match form {
            Form::MapSemi => {
                let r = radius(rng, self.r1);
                Raw {
                    shifts: offset(yb, &self.perturbation(rng, r)),
                    point: Some(xb.clone()),
                    ..Raw::default()
                }
            }
            Form::MapSub => {
                let hi = self.scale(rng);
                Raw {
                    shifts: yb.clone(),
                    point: Some(self.point(rng, hi)),
                    ..Raw::default()
                }
            }
            _ => {
                let mut hi = self.scale(rng);
                if rng.gen_bool(0.5) {
                    hi *= 0.5;
                }
                let drawn = self.point(rng, hi);
                let x = if form == Form::MapRegularFixed {
                    xb.clone()
                } else {
                    drawn
                };
                let slice_seed: u64 = rng.gen();
                let y = if rng.gen_bool(0.5) {
                    let y0 = self
                        .f
                        .nearest_image(&x, yb, slice_seed)
                        .unwrap_or_else(|| yb.clone());
                    let r = radius(rng, hi.min(self.r1));
                    offset(&y0, &self.perturbation(rng, r))
                } else {
                    let r = radius(rng, hi);
                    offset(yb, &self.perturbation(rng, r))
                };
                Raw {
                    shifts: y,
                    point: Some(x),
                    ..Raw::default()
                }
            }
        }
    }

    /// Probe and gauge-argument bounds, or `None` outside the admissible region.
    fn build(&self, form: Form, raw: &Raw, seed: u64) -> Option<(Lhs, f64, f64)> {
        let f = self.f;
        let x = raw.point.as_ref()?;
        let y = &raw.shifts;
        f.check_point(x, y).ok()?;
        let (xb, yb) = (&self.base.x, &self.base.y);
        let (lo, hi) = match form {
            Form::MapSemi => {
                if x != xb {
                    return None;
                }
                let a = f.y_dist(y, yb);
                (a, a)
            }
            Form::MapSub => {
                if y != yb || !(f.x_dist(x, xb) < self.delta2) {
                    return None;
                }
                f.image_bounds(x, y, seed)
            }
            Form::MapRegular | Form::MapRegularBox | Form::MapRegularFixed => {
                let (dx, dy) = (f.x_dist(x, xb), f.y_dist(y, yb));
                let inside = match form {
                    Form::MapRegular => dx + dy < self.delta2,
                    Form::MapRegularBox => dx < self.delta2 && dy < self.delta2,
                    _ => dx == 0.0 && dy < self.delta2,
                };
                if !inside {
                    return None;
                }
                f.image_bounds(x, y, seed)
            }
            _ => return None,
        };
        if hi == 0.0 || !self.below_delta1(hi) {
            return None;
        }
        Some((f.preimage_lhs(x, y), lo, hi))
    }
}

/// Evaluate against `φ(lo)` and, if that does not confirm, against `φ(hi)`.
fn judge(
    lhs: Lhs,
    lo: f64,
    hi: f64,
    gauge: &Gauge,
    tol: f64,
    norm: NormSpec,
    seed: u64,
) -> (f64, f64, Outcome) {
    let (rhs, out) = evaluate(
        &Probe {
            lhs: lhs.clone(),
            arg: lo,
        },
        gauge,
        tol,
        norm,
        seed,
    );
    if lo == hi || matches!(out, Outcome::Holds { .. }) {
        return (lo, rhs, out);
    }
    let (rhs_hi, out_hi) = evaluate(&Probe { lhs, arg: hi }, gauge, tol, norm, seed);
    match out_hi {
        Outcome::Falsified { .. } => (hi, rhs_hi, out_hi),
        _ => (
            lo,
            rhs,
            Outcome::Inconclusive {
                margin: out.margin(rhs),
            },
        ),
    }
}

fn prepare(f: &MappingOracle, base: &GraphPoint, q: &PropertyQuery) -> Result<()> {
    q.validate()?;
    f.validate()?;
    f.check_base(base)
}

/// Certify one metric form of a mapping at `(x̄, ȳ)`.
pub fn certify_mapping_form(
    f: &MappingOracle,
    base: &GraphPoint,
    form: Form,
    q: &PropertyQuery,
) -> Result<Verdict> {
    if !form.is_mapping() {
        return Err(invalid(format!("{form:?} is not a mapping form")));
    }
    prepare(f, base, q)?;
    let tol = f.tol();
    let s = Sampler::new(f, base, q);
    Ok(run_samples(form, q.budget, tol, |i| {
        let mut rng = stream(q.seed, i);
        let raw = s.sample(form, &mut rng);
        let seed = sample_seed(q.seed, i);
        match s.build(form, &raw, seed) {
            Some((lhs, lo, hi)) => {
                let (arg, rhs, outcome) = judge(lhs, lo, hi, &q.gauge, tol, f.eval_norm(), seed);
                Sample::Eval {
                    raw,
                    arg,
                    rhs,
                    outcome,
                }
            }
            None => Sample::Skip,
        }
    }))
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

/// `d(x̄, F⁻¹(y)) ≤ φ(‖y − ȳ‖)` whenever `φ(‖y − ȳ‖) < δ`.
pub fn certify_semiregular(
    f: &MappingOracle,
    base: &GraphPoint,
    q: &PropertyQuery,
) -> Result<Verdict> {
    expect(q, Property::Semi)?;
    certify_mapping_form(f, base, Form::MapSemi, q)
}

/// `d(x, F⁻¹(ȳ)) ≤ φ(d(ȳ, F(x)))` for `x ∈ B_δ₂(x̄)` with `φ(d(ȳ, F(x))) < δ₁`.
pub fn certify_subregular(
    f: &MappingOracle,
    base: &GraphPoint,
    q: &PropertyQuery,
) -> Result<Verdict> {
    expect(q, Property::Sub)?;
    certify_mapping_form(f, base, Form::MapSub, q)
}

/// The property of `q` through its defining form.
pub fn certify_mapping(f: &MappingOracle, base: &GraphPoint, q: &PropertyQuery) -> Result<Verdict> {
    certify_mapping_form(f, base, form_of(q.property), q)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularityReport {
    /// Combined ball `‖x − x̄‖ + ‖y − ȳ‖ < δ₂`: the defining form.
    pub regular: Verdict,
    /// Separate balls `x ∈ B_δ₂(x̄)`, `y ∈ B_δ₂(ȳ)`.
    pub box_form: Verdict,
    /// `x = x̄`, `y ∈ B_δ₂(ȳ)`.
    pub fixed_point: Verdict,
    /// No sampled contradiction of box ⇒ combined ⇒ fixed point.
    pub implications_consistent: bool,
    /// For products of translates, whether the combined and fixed-point
    /// forms agree, as they must.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub combined_iff_fixed: Option<bool>,
}

/// Regularity through its defining form, with the separate-ball and
/// fixed-point variants on the same sample streams.
pub fn certify_regular(
    f: &MappingOracle,
    base: &GraphPoint,
    q: &PropertyQuery,
) -> Result<RegularityReport> {
    expect(q, Property::Full)?;
    let regular = certify_mapping_form(f, base, Form::MapRegular, q)?;
    let box_form = certify_mapping_form(f, base, Form::MapRegularBox, q)?;
    let fixed_point = certify_mapping_form(f, base, Form::MapRegularFixed, q)?;
    let holds = |v: &Verdict| v.status == Status::HoldsOnSamples;
    let fails = |v: &Verdict| v.status == Status::Falsified;
    let implications_consistent =
        !(holds(&box_form) && fails(&regular)) && !(holds(&regular) && fails(&fixed_point));
    let combined_iff_fixed = matches!(f, MappingOracle::ProductOfTranslates { .. })
        .then(|| fails(&regular) == fails(&fixed_point));
    Ok(RegularityReport {
        regular,
        box_form,
        fixed_point,
        implications_consistent,
        combined_iff_fixed,
    })
}

/// Re-derive a mapping witness from its raw data and confirm the violation
/// using only single-set distances or a separation certificate.
pub fn recheck_mapping(
    f: &MappingOracle,
    base: &GraphPoint,
    q: &PropertyQuery,
    w: &Witness,
) -> Result<bool> {
    if !w.form.is_mapping() {
        return Err(invalid(format!("{:?} is not a mapping form", w.form)));
    }
    prepare(f, base, q)?;
    let s = Sampler::new(f, base, q);
    let Some((lhs, _, hi)) = s.build(w.form, &w.raw, sample_seed(q.seed, w.index)) else {
        return Ok(false);
    };
    Ok(confirms_violation(
        &lhs,
        q.gauge.at(hi),
        f.tol(),
        f.eval_norm(),
    ))
}

/// Bracket the Hölder modulus of order `q` of a mapping property.
pub fn estimate_mapping_modulus(
    f: &MappingOracle,
    base: &GraphPoint,
    property: Property,
    q: f64,
    opts: ModulusOptions,
) -> Result<ModulusEstimate> {
    bracket_modulus(property, q, opts, f.tol(), |pq| {
        certify_mapping_form(f, base, form_of(property), pq)
    })
}
