//! Hölder modulus brackets by bisection over α, and the small-scale gauge
//! condition that any boundary point forces on a subtransversality gauge.

use serde::{Deserialize, Serialize};

use super::{certify_form, scene_tol, Property, PropertyQuery, Status, Verdict};
use crate::error::{invalid, Result};
use crate::gauges::Gauge;
use crate::sets::Scene;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModulusOptions {
    /// Largest δ of the sweep `δ_max·2^{−k}`, `k = 0..=sweep`.
    pub delta_max: f64,
    pub sweep: u32,
    /// Samples per certification.
    pub budget: usize,
    pub seed: u64,
    /// Stop once `hi − lo ≤ rel_width·max(1, hi)`.
    pub rel_width: f64,
}

impl Default for ModulusOptions {
    fn default() -> Self {
        ModulusOptions {
            delta_max: 1.0,
            sweep: 20,
            budget: 2000,
            seed: 0,
            rel_width: 0.02,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulusEstimate {
    pub property: Property,
    pub q: f64,
    /// Largest α seen to hold on samples.
    pub lo: f64,
    /// Smallest α seen to fail for every δ of the sweep.
    pub hi: f64,
    /// δ at which `lo` held.
    pub delta_at_lo: Option<f64>,
    /// Whether some α at or above `hi` was only inconclusive.
    pub inconclusive_above: bool,
    pub certifications: usize,
    pub note: String,
}

/// Sweep levels with `φ⁻¹(δ)` below this multiple of the inequality
/// tolerance are skipped as unresolvable.
pub const ARG_FLOOR: f64 = 100.0;

enum Level {
    Holds(f64),
    Fails { inconclusive: bool },
}

struct Probe<C> {
    certify: C,
    property: Property,
    q: f64,
    opts: ModulusOptions,
    tol: f64,
    calls: usize,
}

impl<C: FnMut(&PropertyQuery) -> Result<Verdict>> Probe<C> {
    fn at(&mut self, alpha: f64) -> Result<Level> {
        let gauge = Gauge::power(alpha, self.q)?;
        let mut inconclusive = false;
        for k in 0..=self.opts.sweep {
            let delta = self.opts.delta_max * 0.5f64.powi(k as i32);
            if gauge.inv(delta) < ARG_FLOOR * self.tol {
                inconclusive = true;
                break;
            }
            let q = PropertyQuery::new(self.property, gauge.clone(), delta, delta)
                .with_budget(self.opts.budget)
                .with_seed(self.opts.seed);
            self.calls += 1;
            match (self.certify)(&q)?.status {
                Status::HoldsOnSamples => return Ok(Level::Holds(delta)),
                Status::Inconclusive => inconclusive = true,
                Status::Falsified => {}
            }
        }
        Ok(Level::Fails { inconclusive })
    }
}

/// Bracket the supremum of α for which the property holds with the gauge
/// `α⁻¹·t^q` and some δ.
pub fn estimate_modulus(
    scene: &Scene,
    property: Property,
    q: f64,
    opts: ModulusOptions,
) -> Result<ModulusEstimate> {
    bracket_modulus(property, q, opts, scene_tol(scene), |pq| {
        certify_form(scene, property.form(), pq)
    })
}

/// [`estimate_modulus`] over an arbitrary certifier of `property`.
pub(crate) fn bracket_modulus(
    property: Property,
    q: f64,
    opts: ModulusOptions,
    tol: f64,
    certify: impl FnMut(&PropertyQuery) -> Result<Verdict>,
) -> Result<ModulusEstimate> {
    if !(q > 0.0) || (property != Property::Semi && q > 1.0) {
        return Err(invalid(format!(
            "order q = {q} outside the meaningful range for {property:?}"
        )));
    }
    if !(opts.delta_max > 0.0 && opts.rel_width > 0.0) || opts.budget == 0 {
        return Err(invalid(
            "modulus options need positive δ_max, width and budget",
        ));
    }
    let mut p = Probe {
        certify,
        property,
        q,
        opts,
        tol,
        calls: 0,
    };
    let mut lo = 0.0;
    let mut hi = f64::INFINITY;
    let mut delta_at_lo = None;
    let mut inconclusive_above = false;
    let mut alpha = 1.0;
    // Expand until the bracket is finite on both sides.
    for _ in 0..60 {
        match p.at(alpha)? {
            Level::Holds(d) => {
                lo = alpha;
                delta_at_lo = Some(d);
                if hi.is_finite() {
                    break;
                }
                alpha *= 2.0;
            }
            Level::Fails { inconclusive } => {
                hi = alpha;
                inconclusive_above |= inconclusive;
                if lo > 0.0 {
                    break;
                }
                alpha /= 2.0;
            }
        }
    }
    if !hi.is_finite() {
        return Ok(ModulusEstimate {
            property,
            q,
            lo,
            hi,
            delta_at_lo,
            inconclusive_above,
            certifications: p.calls,
            note: "no falsification found below the expansion limit".into(),
        });
    }
    while hi - lo > opts.rel_width * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        match p.at(mid)? {
            Level::Holds(d) => {
                lo = mid;
                delta_at_lo = Some(d);
            }
            Level::Fails { inconclusive } => {
                hi = mid;
                inconclusive_above |= inconclusive;
            }
        }
    }
    Ok(ModulusEstimate {
        property,
        q,
        lo,
        hi,
        delta_at_lo,
        inconclusive_above,
        certifications: p.calls,
        note: format!(
            "sampling bracket: {} samples per certification, δ sweep {}·2^-k for k ≤ {}",
            opts.budget, opts.delta_max, opts.sweep
        ),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaugeCheck {
    /// The scene is not flagged as having its reference point on the boundary.
    pub skipped: bool,
    /// `min{δ₂, φ⁻¹(δ₁)}`
    pub t_bar: f64,
    /// `φ(t) ≥ t` on every grid point up to `verified_up_to`, which is positive.
    pub passed: bool,
    pub verified_up_to: f64,
    /// Smallest grid point with `φ(t) < t`.
    pub first_violation: Option<f64>,
}

impl GaugeCheck {
    /// A subtransversality verdict that holds while the necessary condition
    /// fails means sampling missed a falsifier or the boundary flag is wrong.
    pub fn alarm(&self, sub: &Verdict) -> bool {
        !self.skipped && !self.passed && sub.status == Status::HoldsOnSamples
    }
}

const GRID: usize = 481;
const GRID_DECADES: f64 = 12.0;

/// Check that `φ(t) ≥ t` near zero on a log grid of `]0, t̄]`, with
/// `t̄ = min{δ₂, φ⁻¹(δ₁)}`. The check passes when the inequality holds on the
/// smallest grid points; `verified_up_to` reports how far it extends.
pub fn necessary_gauge_check(
    scene: &Scene,
    gauge: &Gauge,
    delta1: f64,
    delta2: f64,
) -> Result<GaugeCheck> {
    gauge.validate()?;
    if !(delta1 > 0.0 && delta2 > 0.0) {
        return Err(invalid("deltas must be positive"));
    }
    let t_bar = delta2.min(gauge.inv(delta1));
    let skipped = scene.boundary != Some(true);
    let grid: Vec<f64> = (0..GRID)
        .map(|k| t_bar * 10f64.powf(-GRID_DECADES * (GRID - 1 - k) as f64 / (GRID - 1) as f64))
        .collect();
    let first_bad = grid.iter().position(|&t| gauge.at(t) < t);
    let verified_up_to = match first_bad {
        Some(0) => 0.0,
        Some(i) => grid[i - 1],
        None => t_bar,
    };
    Ok(GaugeCheck {
        skipped,
        t_bar,
        passed: verified_up_to > 0.0,
        verified_up_to,
        first_violation: first_bad.map(|i| grid[i]),
    })
}
