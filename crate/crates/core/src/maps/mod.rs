//! Set-valued mappings `F : X ⇉ Y`, their regularity certifiers, and the
//! translations between regularity of mappings and transversality of sets.
//!
//! A mapping is one of three oracles:
//!
//! * a scalar closed form `y = g(x)` with all preimages known;
//! * a graph given as a set in `X × Y`, measured in the max norm;
//! * the product of translates `F(x) = (Ω₁ − x) × … × (Ωₙ − x)` of a scene,
//!   whose inverse is `F⁻¹(y₁, …, yₙ) = ⋂(Ωᵢ − yᵢ)`.
//!
//! Points of `Y` are stored as blocks: `n` blocks of dimension `d` for a
//! product of translates and a single block otherwise. The norm of `Y` is
//! the maximum of the block norms.

mod regularity;
mod transfer;

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::certify::{tolerance, Lhs, TOL_ANALYTIC};
use crate::error::{invalid, Error, Result};
use crate::geometry::{check_dim, zeros, NormSpec, Point};
use crate::sets::intersection::bounds_unchecked;
use crate::sets::{Exactness, Scene, SetOracle};

pub use regularity::{
    certify_mapping, certify_mapping_form, certify_regular, certify_semiregular,
    certify_subregular, estimate_mapping_modulus, recheck_mapping, RegularityReport,
};
pub use transfer::{
    holder_modulus_sandwich, holder_translation, implied_by_regularity,
    mapping_to_set_transversality, regularity_gauge, regularity_to_transversality_deltas,
    sets_to_mapping_deltas, transfer_regularity_to_transversality, transfer_sets_to_mapping,
    transfer_transversality_to_regularity, transversality_gauge,
    transversality_to_regularity_deltas, GaugeTransfer, HolderTranslation, MappingToSet, Sandwich,
    SetsToMapping,
};

/// Restarts for graph-slice distance bounds.
const SLICE_RESTARTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FnKind {
    /// `x ↦ x³`
    Cubic,
    /// `x ↦ x`
    Identity,
    /// `x ↦ x²`
    Square,
}

impl FnKind {
    pub fn value(self, x: f64) -> f64 {
        match self {
            FnKind::Cubic => x * x * x,
            FnKind::Identity => x,
            FnKind::Square => x * x,
        }
    }

    /// All `x` with `g(x) = y`, ascending.
    pub fn preimage(self, y: f64) -> Vec<f64> {
        match self {
            FnKind::Cubic => vec![y.cbrt()],
            FnKind::Identity => vec![y],
            FnKind::Square if y > 0.0 => vec![-y.sqrt(), y.sqrt()],
            FnKind::Square if y == 0.0 => vec![0.0],
            FnKind::Square => Vec::new(),
        }
    }

    fn coeffs(self) -> Vec<f64> {
        match self {
            FnKind::Cubic => vec![0.0, 0.0, 0.0, 1.0],
            FnKind::Identity => vec![0.0, 1.0],
            FnKind::Square => vec![0.0, 0.0, 1.0],
        }
    }
}

/// A reference point `(x̄, ȳ)` of a graph; `y` is stored as blocks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphPoint {
    pub x: Point,
    pub y: Vec<Point>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MappingOracle {
    /// Scalar closed form `y = g(x)` on `R`.
    SingleValuedFn { kind: FnKind },
    /// `gph F ⊂ R^{dim_x} × R^{dim_y}`, measured in the max norm.
    GraphSet { set: SetOracle, dim_x: usize },
    /// `F(x) = (Ω₁ − x) × … × (Ωₙ − x)` over the sets of a scene.
    ProductOfTranslates { scene: Scene },
}

fn flatten(blocks: &[Point]) -> Point {
    blocks.iter().flatten().copied().collect()
}

impl MappingOracle {
    pub fn single_valued(kind: FnKind) -> Self {
        MappingOracle::SingleValuedFn { kind }
    }

    pub fn graph_set(set: SetOracle, dim_x: usize) -> Result<Self> {
        let m = MappingOracle::GraphSet { set, dim_x };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            MappingOracle::SingleValuedFn { .. } => Ok(()),
            MappingOracle::GraphSet { set, dim_x } => {
                set.validate()?;
                if *dim_x == 0 || *dim_x >= set.dim() {
                    return Err(invalid(format!(
                        "graph of dimension {} cannot split into X of dimension {dim_x} and a nonempty Y",
                        set.dim()
                    )));
                }
                Ok(())
            }
            MappingOracle::ProductOfTranslates { scene } => scene.validate(),
        }
    }

    pub fn dim_x(&self) -> usize {
        match self {
            MappingOracle::SingleValuedFn { .. } => 1,
            MappingOracle::GraphSet { dim_x, .. } => *dim_x,
            MappingOracle::ProductOfTranslates { scene } => scene.dimension,
        }
    }

    /// `(number of blocks, block dimension)` of `Y`.
    pub fn blocks(&self) -> (usize, usize) {
        match self {
            MappingOracle::SingleValuedFn { .. } => (1, 1),
            MappingOracle::GraphSet { set, dim_x } => (1, set.dim() - dim_x),
            MappingOracle::ProductOfTranslates { scene } => (scene.n(), scene.dimension),
        }
    }

    pub fn dim_y(&self) -> usize {
        let (n, d) = self.blocks();
        n * d
    }

    /// Norm of `X` and of each block of `Y`.
    pub fn norm(&self) -> NormSpec {
        match self {
            MappingOracle::ProductOfTranslates { scene } => scene.norm,
            _ => NormSpec::Max,
        }
    }

    pub fn x_dist(&self, a: &[f64], b: &[f64]) -> f64 {
        self.norm().dist(a, b)
    }

    pub fn y_dist(&self, a: &[Point], b: &[Point]) -> f64 {
        let norm = self.norm();
        a.iter()
            .zip(b)
            .map(|(u, v)| norm.dist(u, v))
            .fold(0.0, f64::max)
    }

    /// Inequality tolerance matching how exactly the distances are computed.
    pub fn tol(&self) -> f64 {
        match self {
            MappingOracle::SingleValuedFn { .. } => TOL_ANALYTIC,
            MappingOracle::GraphSet { set, .. } => tolerance(set.exactness(NormSpec::Max)),
            MappingOracle::ProductOfTranslates { scene } => tolerance(scene.exactness()),
        }
    }

    pub fn exactness(&self) -> Exactness {
        match self {
            MappingOracle::SingleValuedFn { .. } => Exactness::Analytic,
            MappingOracle::GraphSet { set, .. } => set.exactness(NormSpec::Max),
            MappingOracle::ProductOfTranslates { scene } => scene.exactness(),
        }
    }

    pub fn check_point(&self, x: &[f64], y: &[Point]) -> Result<()> {
        check_dim(self.dim_x(), x)?;
        let (n, d) = self.blocks();
        if y.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: y.len(),
            });
        }
        y.iter().try_for_each(|b| check_dim(d, b))
    }

    /// `(x̄, ȳ)` used when none is given: the origin for closed forms and
    /// graphs, `(x̄, 0)` for a product of translates.
    pub fn default_base(&self) -> GraphPoint {
        let (n, d) = self.blocks();
        let x = match self {
            MappingOracle::ProductOfTranslates { scene } => scene.basepoint.clone(),
            _ => zeros(self.dim_x()),
        };
        GraphPoint {
            x,
            y: vec![zeros(d); n],
        }
    }

    /// Check that `base` lies on the graph.
    pub fn check_base(&self, base: &GraphPoint) -> Result<()> {
        self.check_point(&base.x, &base.y)?;
        let (_, hi) = self.image_bounds(&base.x, &base.y, 0);
        let tol = self.tol().max(crate::sets::scene::BASEPOINT_TOL);
        if !(hi <= tol) {
            return Err(Error::PremiseViolated(format!(
                "reference point is at distance {hi:e} from the graph, expected ȳ ∈ F(x̄)"
            )));
        }
        Ok(())
    }

    /// `{x} × Y` inside `X × Y`.
    fn y_slice(&self, x: &[f64]) -> SetOracle {
        let dy = self.dim_y();
        if x.len() == 1 && dy == 1 {
            SetOracle::Hyperplane {
                normal: vec![1.0, 0.0],
                offset: x[0],
            }
        } else {
            SetOracle::Product {
                factors: vec![SetOracle::point(x.to_vec()), SetOracle::Whole { dim: dy }],
            }
        }
    }

    /// `X × {y}` inside `X × Y`.
    fn x_slice(&self, y: &[f64]) -> SetOracle {
        let dx = self.dim_x();
        if dx == 1 && y.len() == 1 {
            SetOracle::Hyperplane {
                normal: vec![0.0, 1.0],
                offset: y[0],
            }
        } else {
            SetOracle::Cylinder {
                ambient: dx + y.len(),
                inner: Box::new(SetOracle::point(y.to_vec())),
            }
        }
    }

    /// Bounds `(lower, upper)` on `d(y, F(x))`; `+∞` when `F(x)` is empty.
    pub fn image_bounds(&self, x: &[f64], y: &[Point], seed: u64) -> (f64, f64) {
        match self {
            MappingOracle::SingleValuedFn { kind } => {
                let d = (y[0][0] - kind.value(x[0])).abs();
                (d, d)
            }
            MappingOracle::ProductOfTranslates { scene } => {
                let d = scene
                    .sets
                    .iter()
                    .zip(y)
                    .map(|(s, yi)| {
                        let p: Point = yi.iter().zip(x).map(|(a, b)| a + b).collect();
                        s.d(&p, scene.norm)
                    })
                    .fold(0.0, f64::max);
                (d, d)
            }
            MappingOracle::GraphSet { set, .. } => {
                let mut p = x.to_vec();
                p.extend(flatten(y));
                let b = bounds_unchecked(
                    &[set.clone(), self.y_slice(x)],
                    &p,
                    NormSpec::Max,
                    SLICE_RESTARTS,
                    seed,
                );
                (b.lower, b.upper)
            }
        }
    }

    /// A point of `F(x)` nearest to `toward`, when one is found.
    pub fn nearest_image(&self, x: &[f64], toward: &[Point], seed: u64) -> Option<Vec<Point>> {
        match self {
            MappingOracle::SingleValuedFn { kind } => Some(vec![vec![kind.value(x[0])]]),
            MappingOracle::ProductOfTranslates { scene } => Some(
                scene
                    .sets
                    .iter()
                    .zip(toward)
                    .map(|(s, t)| {
                        let p: Point = t.iter().zip(x).map(|(a, b)| a + b).collect();
                        let w = s.project_unchecked(&p, scene.norm);
                        w.iter().zip(x).map(|(a, b)| a - b).collect()
                    })
                    .collect(),
            ),
            MappingOracle::GraphSet { set, .. } => {
                let mut p = x.to_vec();
                p.extend(flatten(toward));
                let b = bounds_unchecked(
                    &[set.clone(), self.y_slice(x)],
                    &p,
                    NormSpec::Max,
                    SLICE_RESTARTS,
                    seed,
                );
                b.nearest.map(|q| vec![q[x.len()..].to_vec()])
            }
        }
    }

    /// Left side `d(x, F⁻¹(y))` as a probe: closed form when available,
    /// otherwise an intersection evaluated with sound bounds.
    pub(crate) fn preimage_lhs(&self, x: &[f64], y: &[Point]) -> Lhs {
        match self {
            MappingOracle::SingleValuedFn { kind } => Lhs::Exact(
                kind.preimage(y[0][0])
                    .into_iter()
                    .map(|p| (p - x[0]).abs())
                    .fold(f64::INFINITY, f64::min),
            ),
            MappingOracle::ProductOfTranslates { scene } => {
                let at_zero = y.iter().all(|b| b.iter().all(|v| *v == 0.0));
                match &scene.intersection {
                    Some(inter) if at_zero => Lhs::Exact(inter.d(x, scene.norm)),
                    _ => Lhs::Intersection {
                        sets: scene
                            .sets
                            .iter()
                            .zip(y)
                            .map(|(s, yi)| s.translated(yi))
                            .collect(),
                        point: x.to_vec(),
                    },
                }
            }
            MappingOracle::GraphSet { set, .. } => {
                let yf = flatten(y);
                let mut p = x.to_vec();
                p.extend(&yf);
                Lhs::Intersection {
                    sets: vec![set.clone(), self.x_slice(&yf)],
                    point: p,
                }
            }
        }
    }

    /// Bounds `(lower, upper)` on `d(x, F⁻¹(y))`.
    pub fn preimage_bounds(&self, x: &[f64], y: &[Point], seed: u64) -> Result<(f64, f64)> {
        self.check_point(x, y)?;
        Ok(match self.preimage_lhs(x, y) {
            Lhs::Exact(v) => (v, v),
            Lhs::Intersection { sets, point } => {
                let b = bounds_unchecked(&sets, &point, self.eval_norm(), SLICE_RESTARTS, seed);
                (b.lower, b.upper)
            }
        })
    }

    /// Norm in which [`preimage_lhs`](Self::preimage_lhs) probes are measured.
    /// Whether `d(x, F⁻¹(y)) > φ(d(y, F(x)))` is confirmed, regardless of
    /// any δ-domain.
    pub fn violates(&self, x: &[f64], y: &[Point], gauge: &crate::Gauge) -> bool {
        let (_, hi) = self.image_bounds(x, y, 0);
        crate::certify::confirms_violation(
            &self.preimage_lhs(x, y),
            gauge.at(hi),
            self.tol(),
            self.eval_norm(),
        )
    }

    pub(crate) fn eval_norm(&self) -> NormSpec {
        self.norm()
    }

    /// `gph F` as a set in `X × Y`; unavailable for products of translates.
    pub fn graph(&self) -> Result<SetOracle> {
        match self {
            MappingOracle::SingleValuedFn { kind } => Ok(SetOracle::curve(kind.coeffs())),
            MappingOracle::GraphSet { set, .. } => Ok(set.clone()),
            MappingOracle::ProductOfTranslates { .. } => Err(Error::Unsupported(
                "the graph of a product of translates is not a built-in set shape".into(),
            )),
        }
    }

    /// `d((x, y), gph F)` in the max norm of `X × Y`.
    pub fn graph_dist(&self, x: &[f64], y: &[Point]) -> Result<f64> {
        self.check_point(x, y)?;
        let mut p = x.to_vec();
        p.extend(flatten(y));
        Ok(self.graph()?.d(&p, NormSpec::Max))
    }
}

/// The mapping `x ↦ (Ω₁ − x) × … × (Ωₙ − x)` of a scene, with reference
/// point `(x̄, 0)`.
pub fn product_mapping(scene: &Scene) -> Result<(MappingOracle, GraphPoint)> {
    scene.validate()?;
    let m = MappingOracle::ProductOfTranslates {
        scene: scene.clone(),
    };
    let base = m.default_base();
    Ok((m, base))
}

/// The pair `{gph F, X × {ȳ}}` in `X × Y` under the max norm, based at `(x̄, ȳ)`.
pub fn graph_sets(f: &MappingOracle, base: &GraphPoint) -> Result<Scene> {
    let target = SetOracle::point(flatten(&base.y));
    set_pair(f, base, target)
}

/// `{gph F, X × S}` based at `(x̄, ȳ)`.
pub(crate) fn set_pair(f: &MappingOracle, base: &GraphPoint, target: SetOracle) -> Result<Scene> {
    f.validate()?;
    f.check_base(base)?;
    let gph = f.graph()?;
    let yf = flatten(&base.y);
    let dx = f.dim_x();
    let second = match &target {
        SetOracle::Points { points, .. } if points.len() == 1 => f.x_slice(&points[0]),
        _ => SetOracle::Cylinder {
            ambient: dx + yf.len(),
            inner: Box::new(target.clone()),
        },
    };
    let mut basepoint = base.x.clone();
    basepoint.extend(&yf);
    let scene = Scene::new(NormSpec::Max, basepoint, vec![gph, second])?;
    match (f, &target) {
        (MappingOracle::SingleValuedFn { kind }, SetOracle::Points { points, .. })
            if points.len() == 1 =>
        {
            let y = points[0][0];
            let inter = SetOracle::Points {
                dim: 2,
                points: kind.preimage(y).into_iter().map(|x| vec![x, y]).collect(),
            };
            Ok(scene.with_intersection(inter)?.with_boundary(true))
        }
        _ => Ok(scene),
    }
}

/// A set `S ⊂ Y` with a point `ȳ ∈ S`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetSet {
    pub set: SetOracle,
    pub point: Point,
}

impl TargetSet {
    pub fn new(set: SetOracle, point: Point) -> Result<Self> {
        let t = TargetSet { set, point };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        self.set.validate()?;
        check_dim(self.set.dim(), &self.point)?;
        let d = self.set.d(&self.point, NormSpec::Max);
        if !(d <= crate::sets::scene::BASEPOINT_TOL) {
            return Err(invalid(format!("target point is at distance {d:e} from S")));
        }
        Ok(())
    }
}

/// Mapping description as read from JSON: exactly one of `fn`, `graph_set`
/// or `product_of` (a scene file path, relative to the mapping file), and
/// an optional reference point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MappingSpec {
    #[serde(default, rename = "fn", skip_serializing_if = "Option::is_none")]
    pub function: Option<FnSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph_set: Option<GraphSetSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub product_of: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<GraphPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FnSpec {
    pub kind: FnKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSetSpec {
    pub set: SetOracle,
    pub dim_x: usize,
}

impl MappingSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| Error::Schema {
            path: e.path().to_string(),
            msg: e.inner().to_string(),
        })
    }

    /// Build the oracle and its reference point; `product_of` paths are
    /// resolved against `base_dir`.
    pub fn resolve(&self, base_dir: &Path) -> Result<(MappingOracle, GraphPoint)> {
        let given = [
            self.function.is_some(),
            self.graph_set.is_some(),
            self.product_of.is_some(),
        ];
        if given.iter().filter(|g| **g).count() != 1 {
            return Err(Error::Schema {
                path: ".".into(),
                msg: "expected exactly one of `fn`, `graph_set`, `product_of`".into(),
            });
        }
        let m = if let Some(f) = &self.function {
            MappingOracle::single_valued(f.kind)
        } else if let Some(g) = &self.graph_set {
            MappingOracle::graph_set(g.set.clone(), g.dim_x)?
        } else {
            let path = base_dir.join(self.product_of.as_ref().expect("checked above"));
            let text = std::fs::read_to_string(&path)
                .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            MappingOracle::ProductOfTranslates {
                scene: Scene::from_json(&text)?,
            }
        };
        let base = self.base.clone().unwrap_or_else(|| m.default_base());
        m.check_base(&base)?;
        Ok((m, base))
    }
}
