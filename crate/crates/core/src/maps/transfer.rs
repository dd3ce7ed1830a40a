//! Translations between transversality of sets and regularity of mappings.
//!
//! * Sets to mapping: the product of translates of a scene is regular
//!   exactly when the scene is transversal, with the same δ for the semi and
//!   sub properties and `φ⁻¹(δ′₁) + δ′₂ ≤ δ₂` for the full one.
//! * Mapping to sets: regularity of `F` with gauge φ gives transversality of
//!   `{gph F, X × {ȳ}}` with `ψ(t) = φ(2t) + t`. Transversality of that
//!   pair with φ gives regularity of `F` with `ψ(t) = φ(t/2)`.
//! * Mapping to a set: `F` is transversal to `S` when `{gph F, X × S}` is.

use serde::{Deserialize, Serialize};

use super::regularity::{certify_mapping, estimate_mapping_modulus, recheck_mapping};
use super::{graph_sets, product_mapping, set_pair, GraphPoint, MappingOracle, TargetSet};
use crate::certify::{
    certify, estimate_modulus, recheck, witness_for, Form, ModulusEstimate, ModulusOptions,
    Property, PropertyQuery, Raw, Status, Verdict, Witness,
};
use crate::error::{invalid, Result};
use crate::gauges::Gauge;
use crate::geometry::{add, sub, zeros, Point};
use crate::sets::Scene;

fn with_deltas(q: &PropertyQuery, gauge: Gauge, (d1, d2): (f64, f64)) -> PropertyQuery {
    PropertyQuery {
        gauge,
        delta1: d1,
        delta2: (q.property != Property::Semi).then_some(d2),
        ..q.clone()
    }
}

/// Mapping-side `(δ′₁, δ′₂)` for a set-side query. For the full property:
/// `(δ₁, δ₂ − φ⁻¹(δ₁))` when positive, otherwise `(φ(δ₂/2), δ₂/2)`.
pub fn sets_to_mapping_deltas(
    gauge: &Gauge,
    property: Property,
    delta1: f64,
    delta2: f64,
) -> (f64, f64) {
    match property {
        Property::Semi | Property::Sub => (delta1, delta2),
        Property::Full => {
            let r = gauge.inv(delta1);
            if r < delta2 {
                (delta1, delta2 - r)
            } else {
                (gauge.at(delta2 / 2.0), delta2 / 2.0)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetsToMapping {
    pub property: Property,
    pub set_query: PropertyQuery,
    pub map_query: PropertyQuery,
    pub set_side: Verdict,
    pub map_side: Verdict,
    /// Equal statuses (semi, sub). For the full property, whose δs differ,
    /// no mapping-side falsification under a set-side hold.
    pub agree: bool,
    /// Whether every witness re-confirms on the other side. For the full
    /// property the converted witness is checked as a violation of the
    /// inequality, without the δ-domain.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witnesses_convert: Option<bool>,
}

fn set_raw_to_map(property: Property, raw: &Raw, base: &GraphPoint) -> Raw {
    match property {
        Property::Semi => Raw {
            shifts: raw.shifts.clone(),
            point: Some(base.x.clone()),
            ..Raw::default()
        },
        _ => Raw {
            shifts: base.y.clone(),
            point: raw.point.clone(),
            ..Raw::default()
        },
    }
}

fn map_raw_to_set(property: Property, raw: &Raw) -> Raw {
    match property {
        Property::Semi => Raw {
            shifts: raw.shifts.clone(),
            ..Raw::default()
        },
        _ => Raw {
            point: raw.point.clone(),
            ..Raw::default()
        },
    }
}

/// Re-express a full-regularity witness `(x, y)` of the product of translates
/// as anchors `ωᵢ = P_{Ωᵢ}(yᵢ + x)` and shifts `yᵢ + x − ωᵢ`, and keep it
/// when it falsifies the set-side query.
fn full_witness_from_mapping(
    scene: &Scene,
    q: &PropertyQuery,
    w: &Witness,
) -> Result<Option<Witness>> {
    let Some(x) = &w.raw.point else {
        return Ok(None);
    };
    let mut anchors = Vec::with_capacity(scene.sets.len());
    let mut shifts = Vec::with_capacity(scene.sets.len());
    for (set, y) in scene.sets.iter().zip(&w.raw.shifts) {
        let target = add(y, x);
        let omega = set.project(&target, scene.norm)?;
        shifts.push(sub(&target, &omega));
        anchors.push(omega);
    }
    let raw = Raw {
        anchors,
        shifts,
        ..Raw::default()
    };
    witness_for(scene, q, raw, w.index)
}

/// Certify a scene and its product of translates side by side. For the full
/// property a mapping-side witness that also falsifies the set-side query
/// overrides a set-side hold.
pub fn transfer_sets_to_mapping(scene: &Scene, q: &PropertyQuery) -> Result<SetsToMapping> {
    let (f, base) = product_mapping(scene)?;
    let mut set_side = certify(scene, q)?;
    let deltas = sets_to_mapping_deltas(&q.gauge, q.property, q.delta1, q.delta2());
    let map_query = with_deltas(q, q.gauge.clone(), deltas);
    let map_side = certify_mapping(&f, &base, &map_query)?;
    if q.property == Property::Full && set_side.witness.is_none() {
        if let Some(w) = &map_side.witness {
            if let Some(sw) = full_witness_from_mapping(scene, q, w)? {
                set_side.witness = Some(sw);
                set_side.status = Status::Falsified;
            }
        }
    }
    let witnesses_convert = if q.property == Property::Full {
        let mut ok = true;
        if let Some(w) = &set_side.witness {
            let y: Vec<Point> = w
                .raw
                .anchors
                .iter()
                .zip(&w.raw.shifts)
                .map(|(a, s)| add(a, s))
                .collect();
            ok &= f.violates(&zeros(scene.dimension), &y, &q.gauge);
        }
        if let Some(w) = &map_side.witness {
            let x = w
                .raw
                .point
                .as_ref()
                .ok_or_else(|| invalid("mapping witness without a point"))?;
            ok &= f.violates(x, &w.raw.shifts, &q.gauge);
        }
        (set_side.witness.is_some() || map_side.witness.is_some()).then_some(ok)
    } else {
        let map_form = match q.property {
            Property::Semi => Form::MapSemi,
            _ => Form::MapSub,
        };
        let mut ok = true;
        if let Some(w) = &set_side.witness {
            let mw = Witness {
                form: map_form,
                raw: set_raw_to_map(q.property, &w.raw, &base),
                ..w.clone()
            };
            ok &= recheck_mapping(&f, &base, &map_query, &mw)?;
        }
        if let Some(w) = &map_side.witness {
            let sw = Witness {
                form: q.property.form(),
                raw: map_raw_to_set(q.property, &w.raw),
                ..w.clone()
            };
            ok &= recheck(scene, q, &sw)?;
        }
        Some(ok)
    };
    let agree = match q.property {
        Property::Full => {
            !(set_side.status == Status::HoldsOnSamples && map_side.status == Status::Falsified)
        }
        _ => set_side.status == map_side.status,
    };
    Ok(SetsToMapping {
        property: q.property,
        set_query: q.clone(),
        agree,
        map_query,
        set_side,
        map_side,
        witnesses_convert,
    })
}

/// `ψ(t) = φ(2t) + t`, the transversality gauge of the graph pair implied
/// by φ-regularity.
pub fn regularity_gauge(phi: &Gauge) -> Result<Gauge> {
    Gauge::composite(phi.clone(), 1.0, 2.0, 1.0)
}

/// `ψ(t) = φ(t/2)`, the regularity gauge implied by φ-transversality of
/// the graph pair.
pub fn transversality_gauge(phi: &Gauge) -> Result<Gauge> {
    Gauge::composite(phi.clone(), 1.0, 0.5, 0.0)
}

/// Set-side `(δ′₁, δ′₂)` implied by φ-regularity with `(δ₁, δ₂)`:
/// `δ′ = δ + φ⁻¹(δ)/2` (semi); otherwise `δ′₁ = ψ(t)`, with
/// `t = min{φ⁻¹(δ₁)/2, c/2}`, `δ′₂ = c − t`, and `c = δ₂` (sub) or `δ₂/2` (full).
pub fn regularity_to_transversality_deltas(
    phi: &Gauge,
    property: Property,
    delta1: f64,
    delta2: f64,
) -> (f64, f64) {
    let half = phi.inv(delta1) / 2.0;
    match property {
        Property::Semi => {
            let d = delta1 + half;
            (d, d)
        }
        Property::Sub | Property::Full => {
            let cap = if property == Property::Sub {
                delta2
            } else {
                delta2 / 2.0
            };
            let t = half.min(cap / 2.0);
            (phi.at(2.0 * t) + t, cap - t)
        }
    }
}

/// Mapping-side `(δ′₁, δ′₂)` implied by φ-transversality of the graph pair
/// with `(δ₁, δ₂)`, for `ψ(t) = φ(t/2)`: unchanged (semi);
/// `(min{δ₁, ψ(2δ₂)}, δ₂)` (sub); `(ψ(s), δ₂ − s)` with
/// `s = min{ψ⁻¹(δ₁), δ₂}/2` (full).
pub fn transversality_to_regularity_deltas(
    phi: &Gauge,
    property: Property,
    delta1: f64,
    delta2: f64,
) -> (f64, f64) {
    let psi = |t: f64| phi.at(t / 2.0);
    match property {
        Property::Semi => (delta1, delta2),
        Property::Sub => (delta1.min(psi(2.0 * delta2)), delta2),
        Property::Full => {
            let s = (2.0 * phi.inv(delta1)).min(delta2) / 2.0;
            (psi(s), delta2 - s)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaugeTransfer {
    pub property: Property,
    pub premise_query: PropertyQuery,
    pub premise: Verdict,
    /// The implied query, carrying the gauge ψ and the translated deltas.
    pub implied: PropertyQuery,
    /// Present when the premise held on samples.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conclusion: Option<Verdict>,
    /// The conclusion was not falsified.
    pub consistent: bool,
}

fn gauge_transfer(
    q: &PropertyQuery,
    premise: Verdict,
    implied: PropertyQuery,
    conclude: impl FnOnce(&PropertyQuery) -> Result<Verdict>,
) -> Result<GaugeTransfer> {
    let conclusion = if premise.status == Status::HoldsOnSamples {
        Some(conclude(&implied)?)
    } else {
        None
    };
    Ok(GaugeTransfer {
        property: q.property,
        premise_query: q.clone(),
        premise,
        consistent: conclusion
            .as_ref()
            .map_or(true, |v| v.status != Status::Falsified),
        implied,
        conclusion,
    })
}

/// Certify φ-regularity of `F`, then ψ-transversality of `{gph F, X × {ȳ}}`
/// with `ψ(t) = φ(2t) + t` at the translated deltas.
pub fn transfer_regularity_to_transversality(
    f: &MappingOracle,
    base: &GraphPoint,
    q: &PropertyQuery,
) -> Result<GaugeTransfer> {
    let scene = graph_sets(f, base)?;
    let premise = certify_mapping(f, base, q)?;
    let deltas = regularity_to_transversality_deltas(&q.gauge, q.property, q.delta1, q.delta2());
    let implied = with_deltas(q, regularity_gauge(&q.gauge)?, deltas);
    gauge_transfer(q, premise, implied, |iq| certify(&scene, iq))
}

/// Certify φ-transversality of `{gph F, X × {ȳ}}`, then ψ-regularity of `F`
/// with `ψ(t) = φ(t/2)` at the translated deltas.
pub fn transfer_transversality_to_regularity(
    f: &MappingOracle,
    base: &GraphPoint,
    q: &PropertyQuery,
) -> Result<GaugeTransfer> {
    let scene = graph_sets(f, base)?;
    let premise = certify(&scene, q)?;
    let deltas = transversality_to_regularity_deltas(&q.gauge, q.property, q.delta1, q.delta2());
    let implied = with_deltas(q, transversality_gauge(&q.gauge)?, deltas);
    gauge_transfer(q, premise, implied, |iq| certify_mapping(f, base, iq))
}

/// Semiregularity with `δ = min{δ₁, φ(δ₂)}` and subregularity with
/// `(δ₁, δ₂)`, both implied by regularity with `(δ₁, δ₂)`.
pub fn implied_by_regularity(q: &PropertyQuery) -> Result<[PropertyQuery; 2]> {
    if q.property != Property::Full {
        return Err(invalid("expected a regularity query"));
    }
    let semi = PropertyQuery {
        property: Property::Semi,
        delta1: q.delta1.min(q.gauge.at(q.delta2())),
        delta2: None,
        ..q.clone()
    };
    let sub = PropertyQuery {
        property: Property::Sub,
        ..q.clone()
    };
    Ok([semi, sub])
}

/// Parameters of the Hölder case `φ(t) = α⁻¹·t^q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolderTranslation {
    pub alpha: f64,
    pub q: f64,
    /// `2^{−q}·α`
    pub alpha1: f64,
    /// `2^{q}·α`: the regularity modulus implied by α-transversality of the graph pair.
    pub alpha2: f64,
    /// `ψ(t) = α₁⁻¹·t^q + t`, the transversality gauge implied by α-regularity.
    pub psi: Gauge,
    /// Order of the Hölder minorant of ψ.
    pub q_prime: f64,
    /// Supremum of the admissible moduli of that minorant.
    pub alpha_prime_sup: f64,
}

pub fn holder_translation(alpha: f64, q: f64) -> Result<HolderTranslation> {
    Gauge::power(alpha, q)?;
    let alpha1 = 2f64.powf(-q) * alpha;
    let psi = Gauge::holder_type(alpha1, alpha1, q)?;
    let approx = psi.holder_approximation(None)?;
    Ok(HolderTranslation {
        alpha,
        q,
        alpha1,
        alpha2: 2f64.powf(q) * alpha,
        psi,
        q_prime: approx.q_prime,
        alpha_prime_sup: approx.alpha_prime_sup,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sandwich {
    pub property: Property,
    pub q: f64,
    /// Bracket of the mapping modulus.
    pub mapping: ModulusEstimate,
    /// Bracket of the graph-pair modulus, estimated independently.
    pub sets: ModulusEstimate,
    /// `[m_lo/(m_lo + 2^q), m_hi/2^q]` from the mapping bracket `[m_lo, m_hi]`.
    pub predicted: [f64; 2],
    /// The set bracket reaches the predicted lower end (within the bracket width).
    pub lower_ok: bool,
    /// The set bracket starts below the predicted upper end (within the bracket width).
    pub upper_ok: bool,
}

/// Estimate both Hölder moduli of order `q ∈ ]0, 1[` and check that the
/// graph-pair modulus lies between `m/(m + 2^q)` and `m/2^q`.
pub fn holder_modulus_sandwich(
    f: &MappingOracle,
    base: &GraphPoint,
    property: Property,
    q: f64,
    opts: ModulusOptions,
) -> Result<Sandwich> {
    if !(q > 0.0 && q < 1.0) {
        return Err(invalid(format!("order must lie in ]0, 1[, got {q}")));
    }
    let scene = graph_sets(f, base)?;
    let mapping = estimate_mapping_modulus(f, base, property, q, opts)?;
    let sets = estimate_modulus(&scene, property, q, opts)?;
    let c = 2f64.powf(q);
    let predicted = [mapping.lo / (mapping.lo + c), mapping.hi / c];
    let w = opts.rel_width;
    Ok(Sandwich {
        property,
        q,
        lower_ok: sets.hi >= predicted[0] * (1.0 - w),
        upper_ok: sets.lo <= predicted[1] * (1.0 + w),
        predicted,
        mapping,
        sets,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MappingToSet {
    /// `{gph F, X × S}` based at `(x̄, ȳ)`.
    pub scene: Scene,
    pub verdict: Verdict,
    /// The same scene certified through its product of translates.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cross_check: Option<SetsToMapping>,
}

/// Transversality of `F` to `S` at `(x̄, ȳ)`, as transversality of
/// `{gph F, X × S}`; optionally cross-checked through the product of
/// translates of that pair.
pub fn mapping_to_set_transversality(
    f: &MappingOracle,
    target: &TargetSet,
    base: &GraphPoint,
    q: &PropertyQuery,
    cross_check: bool,
) -> Result<MappingToSet> {
    target.validate()?;
    let yb: Vec<f64> = base.y.iter().flatten().copied().collect();
    if yb != target.point {
        return Err(invalid("the target point must equal ȳ"));
    }
    let scene = set_pair(f, base, target.set.clone())?;
    if cross_check {
        let report = transfer_sets_to_mapping(&scene, q)?;
        Ok(MappingToSet {
            verdict: report.set_side.clone(),
            scene,
            cross_check: Some(report),
        })
    } else {
        Ok(MappingToSet {
            verdict: certify(&scene, q)?,
            scene,
            cross_check: None,
        })
    }
}
