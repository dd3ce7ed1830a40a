//! A finite collection of sets in `R^d` with a common reference point.

use serde::{Deserialize, Serialize};

use super::{Exactness, SetOracle};
use crate::error::{invalid, Error, Result};
use crate::geometry::{check_dim, NormSpec, Point};

/// Reference points must lie in every set up to this distance.
pub const BASEPOINT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scene {
    pub dimension: usize,
    #[serde(default)]
    pub norm: NormSpec,
    pub basepoint: Point,
    pub sets: Vec<SetOracle>,
    /// A declared closed form for the intersection of `sets`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intersection: Option<SetOracle>,
    /// Whether the basepoint lies on the boundary of the intersection.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary: Option<bool>,
}

impl Scene {
    pub fn new(norm: NormSpec, basepoint: Point, sets: Vec<SetOracle>) -> Result<Self> {
        let s = Scene {
            dimension: basepoint.len(),
            norm,
            basepoint,
            sets,
            intersection: None,
            boundary: None,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn with_intersection(mut self, inter: SetOracle) -> Result<Self> {
        self.intersection = Some(inter);
        self.validate()?;
        Ok(self)
    }

    pub fn with_boundary(mut self, flag: bool) -> Self {
        self.boundary = Some(flag);
        self
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let scene: Scene = serde_path_to_error::deserialize(de).map_err(|e| Error::Schema {
            path: e.path().to_string(),
            msg: e.inner().to_string(),
        })?;
        scene.validate()?;
        Ok(scene)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scene serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.dimension == 0 {
            return Err(invalid("scene dimension must be positive"));
        }
        if self.sets.is_empty() {
            return Err(invalid("scene needs at least one set"));
        }
        check_dim(self.dimension, &self.basepoint)?;
        for (i, s) in self.sets.iter().chain(&self.intersection).enumerate() {
            s.validate()?;
            if s.dim() != self.dimension {
                return Err(Error::DimensionMismatch {
                    expected: self.dimension,
                    got: s.dim(),
                });
            }
            let d = s.d(&self.basepoint, self.norm);
            if !(d <= BASEPOINT_TOL) {
                return Err(invalid(format!(
                    "basepoint is at distance {d:e} from set {i}, expected it to be a common point"
                )));
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.sets.len()
    }

    pub fn exactness(&self) -> Exactness {
        if self
            .sets
            .iter()
            .any(|s| s.exactness(self.norm) == Exactness::Iterative)
        {
            Exactness::Iterative
        } else {
            Exactness::Analytic
        }
    }

    /// Maximum of the per-set distances.
    pub fn max_dist(&self, x: &[f64]) -> f64 {
        self.sets
            .iter()
            .map(|s| s.d(x, self.norm))
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_scene_json() {
        let text = r#"{"dimension": 2, "norm": "max", "basepoint": [0, 0],
            "sets": [{"halfspace": {"normal": [0, 1], "offset": 0}},
                     {"epigraph_poly": {"coeffs": [0, 0, 1], "sense": "le"}}]}"#;
        let s = Scene::from_json(text).unwrap();
        assert_eq!(s.n(), 2);
        assert_eq!(s.max_dist(&[0.0, -1.0]), 1.0);
    }

    #[test]
    fn schema_errors_name_the_path() {
        let text = r#"{"dimension": 2, "basepoint": [0, 0],
            "sets": [{"halfspace": {"normal": [0, 1], "offst": 0}}]}"#;
        match Scene::from_json(text) {
            Err(Error::Schema { path, .. }) => assert!(path.starts_with("sets[0]"), "{path}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn basepoint_must_be_common() {
        let text = r#"{"dimension": 2, "basepoint": [0, -1],
            "sets": [{"halfspace": {"normal": [0, 1], "offset": 0}}]}"#;
        assert!(matches!(
            Scene::from_json(text),
            Err(Error::InvalidParameter(_))
        ));
    }
}
