//! Slopes of extended-real functions, a constructive Ekeland procedure on
//! finite domains, and sampled checkers for the slope sufficient conditions
//! of the three transversality properties.
//!
//! Local slopes are limits that sampling cannot reach; every estimate comes
//! with its shell table `(r_k, sup over the shell)` so convergence can be
//! inspected, and the reported value is the one at the smallest shell.

mod conditions;
mod coupled;
mod ekeland;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::gauges::Gauge;
use crate::geometry::{NormSpec, Point};
use crate::json::ext_f64;
use crate::rng::{direction, stream};
use rand::Rng;

pub use conditions::{
    check_full_slope_condition, check_semi_slope_condition, check_sub_slope_condition, AnchorRule,
    ConditionStatus, SlopeCheck, SlopeConditionQuery, SlopeWitness, SLOPE_TOL,
};
pub use coupled::{gamma_slope, Config, CoupledObjective, SlopeMode};
pub use ekeland::SampledFunction;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlopeQuery {
    /// Outermost shell radius.
    pub r0: f64,
    /// Shells `r0·2^{−k}`, `k = 0..=shells`.
    pub shells: usize,
    pub per_shell: usize,
    #[serde(default)]
    pub seed: u64,
}

impl Default for SlopeQuery {
    fn default() -> Self {
        SlopeQuery {
            r0: 1.0,
            shells: 20,
            per_shell: 16,
            seed: 0,
        }
    }
}

impl SlopeQuery {
    pub fn validate(&self) -> Result<()> {
        if !(self.r0 > 0.0 && self.r0.is_finite()) {
            return Err(invalid("r0 must be positive"));
        }
        if self.shells < 4 || self.per_shell == 0 {
            return Err(invalid("need at least 4 shells and one sample per shell"));
        }
        Ok(())
    }

    pub(crate) fn radius(&self, k: usize) -> f64 {
        self.r0 * 0.5f64.powi(k as i32)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShellRow {
    pub radius: f64,
    #[serde(with = "ext_f64")]
    pub sup: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeEstimate {
    #[serde(with = "ext_f64")]
    pub value: f64,
    pub shells: Vec<ShellRow>,
}

impl SlopeEstimate {
    fn infinite() -> Self {
        SlopeEstimate {
            value: f64::INFINITY,
            shells: Vec::new(),
        }
    }
}

/// Shell samples `(k, u)`: the first point of each shell sits at radius
/// exactly `r_k`, the rest at radii in `[r_k/2, r_k)`.
fn shell_points(x: &[f64], norm: NormSpec, q: &SlopeQuery) -> Vec<(usize, Point)> {
    let mut out = Vec::with_capacity((q.shells + 1) * q.per_shell);
    for k in 0..=q.shells {
        let mut rng = stream(q.seed, k as u64);
        let r = q.radius(k);
        for j in 0..q.per_shell {
            let s = if j == 0 { 1.0 } else { rng.gen_range(0.5..1.0) };
            let v = direction(&mut rng, x.len(), norm);
            out.push((k, x.iter().zip(&v).map(|(a, b)| a + r * s * b).collect()));
        }
    }
    out
}

fn center_value(f: &impl Fn(&[f64]) -> f64, x: &[f64]) -> Result<f64> {
    let fx = f(x);
    if fx.is_nan() || fx == f64::NEG_INFINITY {
        return Err(Error::Domain(format!(
            "function value at the center is {fx}"
        )));
    }
    Ok(fx)
}

/// Local slope `limsup_{u→x} [f(x) − f(u)]₊ / d(x, u)`, estimated shell by
/// shell. `+∞` when `f(x) = +∞`.
pub fn slope(
    f: impl Fn(&[f64]) -> f64,
    x: &[f64],
    norm: NormSpec,
    q: &SlopeQuery,
) -> Result<SlopeEstimate> {
    q.validate()?;
    let fx = center_value(&f, x)?;
    if fx == f64::INFINITY {
        return Ok(SlopeEstimate::infinite());
    }
    let mut shells: Vec<ShellRow> = (0..=q.shells)
        .map(|k| ShellRow {
            radius: q.radius(k),
            sup: 0.0,
        })
        .collect();
    for (k, u) in shell_points(x, norm, q) {
        let ratio = (fx - f(&u)).max(0.0) / norm.dist(x, &u);
        if ratio > shells[k].sup {
            shells[k].sup = ratio;
        }
    }
    Ok(SlopeEstimate {
        value: shells.last().expect("at least one shell").sup,
        shells,
    })
}

/// Nonlocal slope `sup_{u≠x} [f(x) − f₊(u)]₊ / d(x, u)` over the shell
/// samples plus any `extra` points.
pub fn nonlocal_slope(
    f: impl Fn(&[f64]) -> f64,
    x: &[f64],
    norm: NormSpec,
    q: &SlopeQuery,
    extra: &[Point],
) -> Result<f64> {
    q.validate()?;
    let fx = center_value(&f, x)?;
    if fx == f64::INFINITY {
        return Ok(f64::INFINITY);
    }
    let pts = shell_points(x, norm, q);
    Ok(pts
        .iter()
        .map(|(_, u)| u)
        .chain(extra)
        .filter(|u| norm.dist(x, u) > 0.0)
        .map(|u| (fx - f(u).max(0.0)).max(0.0) / norm.dist(x, u))
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainRule {
    /// Slope of `φ∘f`.
    pub lhs: f64,
    /// `φ′(f(x))·|∇f|(x)`
    pub rhs: f64,
    pub diff: f64,
}

/// Compare the slope of `φ∘f` with `φ′(f(x))` times the slope of `f`.
pub fn chain_rule_check(
    f: impl Fn(&[f64]) -> f64,
    gauge: &Gauge,
    x: &[f64],
    norm: NormSpec,
    q: &SlopeQuery,
) -> Result<ChainRule> {
    gauge.validate()?;
    if !gauge.is_c1() {
        return Err(Error::Unsupported(
            "chain rule needs a differentiable gauge".into(),
        ));
    }
    let fx = center_value(&f, x)?;
    if !(fx > 0.0 && fx.is_finite()) {
        return Err(Error::Domain(format!("need 0 < f(x) < ∞, got {fx}")));
    }
    let composed = |u: &[f64]| {
        let v = f(u);
        if v <= 0.0 {
            0.0
        } else {
            gauge.at(v)
        }
    };
    let lhs = slope(composed, x, norm, q)?.value;
    let rhs = gauge.derivative(fx)? * slope(&f, x, norm, q)?.value;
    Ok(ChainRule {
        lhs,
        rhs,
        diff: (lhs - rhs).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn abs_and_square() {
        let q = SlopeQuery::default();
        let s = slope(|u: &[f64]| u[0].abs(), &[1.0], NormSpec::Max, &q).unwrap();
        assert!((s.value - 1.0).abs() < 1e-12);
        let s = slope(|u: &[f64]| u[0] * u[0], &[3.0], NormSpec::Max, &q).unwrap();
        assert!((s.value - 6.0).abs() < 1e-3);
        assert_eq!(s.shells.len(), 21);
    }

    #[test]
    fn infinite_center() {
        let s = slope(
            |_: &[f64]| f64::INFINITY,
            &[0.0],
            NormSpec::Max,
            &SlopeQuery::default(),
        )
        .unwrap();
        assert_eq!(s.value, f64::INFINITY);
    }

    #[test]
    fn chain_rule_square_of_abs() {
        let g = Gauge::scaled_power(1.0, 2.0).unwrap();
        let c = chain_rule_check(
            |u: &[f64]| u[0].abs(),
            &g,
            &[2.0],
            NormSpec::Max,
            &SlopeQuery::default(),
        )
        .unwrap();
        assert!((c.rhs - 4.0).abs() < 1e-9 && c.diff < 1e-4, "{c:?}");
    }
}
