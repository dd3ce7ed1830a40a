//! Points, the max and Euclidean norms, and the γ-weighted product norm
//! `‖(x1,…,xn,x)‖_γ = max{‖x‖, γ·maxᵢ‖xᵢ‖}` used by the coupled objectives.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub type Point = Vec<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormSpec {
    #[default]
    Max,
    Euclidean,
}

impl NormSpec {
    pub fn of(self, p: &[f64]) -> f64 {
        match self {
            NormSpec::Max => p.iter().fold(0.0, |m, v| m.max(v.abs())),
            NormSpec::Euclidean => p.iter().map(|v| v * v).sum::<f64>().sqrt(),
        }
    }

    pub fn dist(self, a: &[f64], b: &[f64]) -> f64 {
        debug_assert_eq!(a.len(), b.len());
        match self {
            NormSpec::Max => a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs())),
            NormSpec::Euclidean => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt(),
        }
    }

    /// Norm of a linear functional `a` measured in the dual norm.
    pub fn dual_of(self, a: &[f64]) -> f64 {
        match self {
            NormSpec::Max => a.iter().map(|v| v.abs()).sum(),
            NormSpec::Euclidean => a.iter().map(|v| v * v).sum::<f64>().sqrt(),
        }
    }

    /// Radius factor such that the cube of half-width `w` lies in the norm ball of radius `w * cover(d)`.
    pub(crate) fn cover(self, d: usize) -> f64 {
        match self {
            NormSpec::Max => 1.0,
            NormSpec::Euclidean => (d as f64).sqrt(),
        }
    }
}

pub fn norm(spec: NormSpec, p: &[f64]) -> f64 {
    spec.of(p)
}

/// Product norm over a tuple of points, taking the maximum across factors.
pub fn product_norm(spec: NormSpec, xs: &[Point]) -> f64 {
    xs.iter().fold(0.0, |m, x| m.max(spec.of(x)))
}

/// `max{‖x‖, γ·maxᵢ‖xᵢ‖}`; with no leading factors this is `‖x‖`.
pub fn gamma_norm(spec: NormSpec, gamma: f64, xs: &[Point], x: &[f64]) -> Result<f64> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(invalid(format!("gamma must be positive, got {gamma}")));
    }
    for xi in xs {
        check_dim(x.len(), xi)?;
    }
    Ok(spec.of(x).max(gamma * product_norm(spec, xs)))
}

pub fn check_dim(expected: usize, p: &[f64]) -> Result<()> {
    if p.len() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            got: p.len(),
        });
    }
    Ok(())
}

pub fn add(a: &[f64], b: &[f64]) -> Point {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> Point {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(a: &[f64], s: f64) -> Point {
    a.iter().map(|x| x * s).collect()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn zeros(d: usize) -> Point {
    vec![0.0; d]
}

/// Lexicographic comparison used for deterministic tie-breaking.
pub fn lex_less(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return true;
        }
        if x > y {
            return false;
        }
    }
    false
}
