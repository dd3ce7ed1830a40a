use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{NormSpec, Point};

/// A function on a finite subset of a normed space; `+∞` values mark points
/// outside its domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledFunction {
    pub points: Vec<Point>,
    pub values: Vec<f64>,
    #[serde(default)]
    pub norm: NormSpec,
}

impl SampledFunction {
    pub fn new(points: Vec<Point>, values: Vec<f64>, norm: NormSpec) -> Result<Self> {
        if points.is_empty() || points.len() != values.len() {
            return Err(invalid("need a nonempty domain with one value per point"));
        }
        let d = points[0].len();
        if points.iter().any(|p| p.len() != d) {
            return Err(invalid("domain points differ in dimension"));
        }
        if values.iter().any(|v| v.is_nan() || *v == f64::NEG_INFINITY) {
            return Err(invalid("values must be real or +∞"));
        }
        if !values.iter().any(|v| v.is_finite()) {
            return Err(invalid("at least one value must be finite"));
        }
        Ok(SampledFunction {
            points,
            values,
            norm,
        })
    }

    pub fn inf(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    fn d(&self, i: usize, j: usize) -> f64 {
        self.norm.dist(&self.points[i], &self.points[j])
    }

    /// Ekeland point from `x0` with `f(x0) < inf f + ε`: repeatedly move to the
    /// point minimizing `f(u) + (ε/λ)·d(u, current)` while that is strictly
    /// below `f(current)`. Returns the index of `x̂`.
    pub fn ekeland(&self, x0: usize, epsilon: f64, lambda: f64) -> Result<usize> {
        if x0 >= self.points.len() {
            return Err(invalid("start index out of range"));
        }
        if !(epsilon > 0.0 && lambda > 0.0) {
            return Err(invalid("ε and λ must be positive"));
        }
        if !(self.values[x0] < self.inf() + epsilon) {
            return Err(Error::PremiseViolated(format!(
                "f(x0) = {} is not below inf f + ε = {}",
                self.values[x0],
                self.inf() + epsilon
            )));
        }
        let rate = epsilon / lambda;
        let mut cur = x0;
        loop {
            let fc = self.values[cur];
            let best = (0..self.points.len())
                .filter(|&u| u != cur)
                .map(|u| (u, self.values[u] + rate * self.d(u, cur)))
                .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
            match best {
                Some((u, v)) if v < fc => cur = u,
                _ => return Ok(cur),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_point_instance() {
        let f = SampledFunction::new(
            vec![vec![0.0], vec![1.0], vec![2.0]],
            vec![0.5, 0.4, 1.0],
            NormSpec::Max,
        )
        .unwrap();
        assert_eq!(f.ekeland(2, 0.7, 2.0).unwrap(), 1);
        assert_eq!(f.ekeland(1, 0.7, 2.0).unwrap(), 1);
        assert!(matches!(
            f.ekeland(2, 0.5, 2.0),
            Err(Error::PremiseViolated(_))
        ));
    }
}
