//! Set oracles: distance, projection witness, membership and near-point
//! sampling for a library of analytic shapes, plus scenes and intersection
//! distance bounds.
//!
//! Translation follows the `Ω − s` convention: `Translate { inner, shift }`
//! is the set `inner − shift`, so its distance at `x` is the inner distance at
//! `x + shift`.

mod curve;
pub mod intersection;
pub mod scene;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{check_dim, dot, NormSpec, Point};
use crate::rng::stream;
pub(crate) use curve::{Piece, Profile};

pub use intersection::{dist_intersection, Bounds};
pub use scene::Scene;

pub const ANALYTIC_TOL: f64 = 1e-12;
pub const ITERATIVE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Ge,
    Le,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CuspSign {
    /// `γ^{1/q}·ξ2 + |ξ1|^{1/q} ≥ 0`
    Plus,
    /// `γ^{1/q}·ξ2 − |ξ1|^{1/q} ≤ 0`
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Exactness {
    Analytic,
    Iterative,
}

impl Exactness {
    pub fn tol(self) -> f64 {
        match self {
            Exactness::Analytic => ANALYTIC_TOL,
            Exactness::Iterative => ITERATIVE_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SetOracle {
    /// The whole space `R^dim`.
    Whole {
        dim: usize,
    },
    /// `{x : ⟨normal, x⟩ ≥ offset}`
    #[serde(rename = "halfspace")]
    HalfSpace {
        normal: Point,
        offset: f64,
    },
    /// `{x : ⟨normal, x⟩ = offset}`
    Hyperplane {
        normal: Point,
        offset: f64,
    },
    /// `{point + t·direction : t ∈ R}`
    AffineLine {
        point: Point,
        direction: Point,
    },
    /// Closed ball of the scene norm.
    Ball {
        center: Point,
        radius: f64,
    },
    /// `{ξ2 ≥ p(ξ1)}` (sense `ge`) or `{ξ2 ≤ p(ξ1)}` (sense `le`), coefficients ascending.
    EpigraphPoly {
        coeffs: Vec<f64>,
        sense: Sense,
    },
    /// `{ξ2 = p(ξ1)}`
    CurveGraph {
        coeffs: Vec<f64>,
    },
    PowerCusp {
        gamma: f64,
        q: f64,
        sign: CuspSign,
    },
    Translate {
        inner: Box<SetOracle>,
        shift: Point,
    },
    Product {
        factors: Vec<SetOracle>,
    },
    /// `R^{ambient − k} × inner` with `inner ⊂ R^k` in the trailing coordinates.
    Cylinder {
        ambient: usize,
        inner: Box<SetOracle>,
    },
    /// Finite union of points; may be empty.
    Points {
        dim: usize,
        points: Vec<Point>,
    },
}

fn planar(x: &[f64]) -> [f64; 2] {
    [x[0], x[1]]
}

impl SetOracle {
    pub fn half_space(normal: Point, offset: f64) -> Self {
        SetOracle::HalfSpace { normal, offset }
    }

    pub fn line(point: Point, direction: Point) -> Self {
        SetOracle::AffineLine { point, direction }
    }

    pub fn epigraph(coeffs: Vec<f64>) -> Self {
        SetOracle::EpigraphPoly {
            coeffs,
            sense: Sense::Ge,
        }
    }

    pub fn hypograph(coeffs: Vec<f64>) -> Self {
        SetOracle::EpigraphPoly {
            coeffs,
            sense: Sense::Le,
        }
    }

    pub fn curve(coeffs: Vec<f64>) -> Self {
        SetOracle::CurveGraph { coeffs }
    }

    pub fn point(p: Point) -> Self {
        SetOracle::Points {
            dim: p.len(),
            points: vec![p],
        }
    }

    /// `self − shift`
    pub fn translated(&self, shift: &[f64]) -> Self {
        SetOracle::Translate {
            inner: Box::new(self.clone()),
            shift: shift.to_vec(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            SetOracle::Whole { dim } | SetOracle::Points { dim, .. } => *dim,
            SetOracle::HalfSpace { normal, .. } | SetOracle::Hyperplane { normal, .. } => {
                normal.len()
            }
            SetOracle::AffineLine { point, .. } => point.len(),
            SetOracle::Ball { center, .. } => center.len(),
            SetOracle::EpigraphPoly { .. }
            | SetOracle::CurveGraph { .. }
            | SetOracle::PowerCusp { .. } => 2,
            SetOracle::Translate { inner, .. } => inner.dim(),
            SetOracle::Product { factors } => factors.iter().map(|f| f.dim()).sum(),
            SetOracle::Cylinder { ambient, .. } => *ambient,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let nonzero = |v: &[f64], what: &str| -> Result<()> {
            if v.is_empty() || v.iter().all(|a| *a == 0.0) || v.iter().any(|a| !a.is_finite()) {
                return Err(invalid(format!("{what} must be a finite nonzero vector")));
            }
            Ok(())
        };
        match self {
            SetOracle::Whole { dim } if *dim == 0 => Err(invalid("dimension must be positive")),
            SetOracle::Whole { .. } => Ok(()),
            SetOracle::HalfSpace { normal, .. } | SetOracle::Hyperplane { normal, .. } => {
                nonzero(normal, "normal")
            }
            SetOracle::AffineLine { point, direction } => {
                nonzero(direction, "direction")?;
                check_dim(point.len(), direction)
            }
            SetOracle::Ball { radius, .. } if !(*radius >= 0.0) => {
                Err(invalid("ball radius must be nonnegative"))
            }
            SetOracle::Ball { .. } => Ok(()),
            SetOracle::EpigraphPoly { coeffs, .. } | SetOracle::CurveGraph { coeffs } => {
                if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
                    return Err(invalid(
                        "polynomial coefficients must be finite and nonempty",
                    ));
                }
                Ok(())
            }
            SetOracle::PowerCusp { gamma, q, .. } => {
                if !(*gamma > 0.0 && *q > 0.0) {
                    return Err(invalid("cusp parameters must be positive"));
                }
                Ok(())
            }
            SetOracle::Translate { inner, shift } => {
                inner.validate()?;
                check_dim(inner.dim(), shift)
            }
            SetOracle::Product { factors } => {
                if factors.is_empty() {
                    return Err(invalid("product needs at least one factor"));
                }
                factors.iter().try_for_each(|f| f.validate())
            }
            SetOracle::Cylinder { ambient, inner } => {
                inner.validate()?;
                if inner.dim() > *ambient {
                    return Err(invalid("cylinder base exceeds ambient dimension"));
                }
                Ok(())
            }
            SetOracle::Points { dim, points } => points.iter().try_for_each(|p| check_dim(*dim, p)),
        }
    }

    pub fn exactness(&self, norm: NormSpec) -> Exactness {
        match self {
            SetOracle::PowerCusp { .. } if norm == NormSpec::Euclidean => Exactness::Iterative,
            SetOracle::Translate { inner, .. } | SetOracle::Cylinder { inner, .. } => {
                inner.exactness(norm)
            }
            SetOracle::Product { factors } => {
                if factors
                    .iter()
                    .any(|f| f.exactness(norm) == Exactness::Iterative)
                {
                    Exactness::Iterative
                } else {
                    Exactness::Analytic
                }
            }
            _ => Exactness::Analytic,
        }
    }

    pub fn tol(&self, norm: NormSpec) -> f64 {
        self.exactness(norm).tol()
    }

    fn graph_piece(&self) -> Option<(Piece, Option<Sense>)> {
        match self {
            SetOracle::EpigraphPoly { coeffs, sense } => Some((
                Piece::Graph {
                    g: Profile::Poly(coeffs.clone()),
                    a: [0.0, 0.0],
                },
                Some(*sense),
            )),
            SetOracle::CurveGraph { coeffs } => Some((
                Piece::Graph {
                    g: Profile::Poly(coeffs.clone()),
                    a: [0.0, 0.0],
                },
                None,
            )),
            SetOracle::PowerCusp { gamma, q, sign } => {
                let c = gamma.powf(-1.0 / q);
                let (s, sense) = match sign {
                    CuspSign::Plus => (-1.0, Sense::Ge),
                    CuspSign::Minus => (1.0, Sense::Le),
                };
                Some((
                    Piece::Graph {
                        g: Profile::Cusp {
                            c,
                            e: 1.0 / q,
                            sign: s,
                        },
                        a: [0.0, 0.0],
                    },
                    Some(sense),
                ))
            }
            _ => None,
        }
    }

    pub fn dist(&self, x: &[f64], norm: NormSpec) -> Result<f64> {
        check_dim(self.dim(), x)?;
        Ok(self.d(x, norm))
    }

    /// Distance without the dimension check.
    pub(crate) fn d(&self, x: &[f64], norm: NormSpec) -> f64 {
        match self {
            SetOracle::Whole { .. } => 0.0,
            SetOracle::HalfSpace { normal, offset } => {
                let gap = offset - dot(normal, x);
                if gap <= 0.0 {
                    0.0
                } else {
                    gap / norm.dual_of(normal)
                }
            }
            SetOracle::Hyperplane { normal, offset } => {
                (offset - dot(normal, x)).abs() / norm.dual_of(normal)
            }
            SetOracle::AffineLine { .. } => {
                let p = self.project_unchecked(x, norm);
                norm.dist(&p, x)
            }
            SetOracle::Ball { center, radius } => (norm.dist(x, center) - radius).max(0.0),
            SetOracle::EpigraphPoly { .. }
            | SetOracle::CurveGraph { .. }
            | SetOracle::PowerCusp { .. } => {
                let (piece, sense) = self.graph_piece().expect("graph shape");
                if inside_graph_region(&piece, sense, x) {
                    return 0.0;
                }
                piece.nearest(planar(x), norm).1
            }
            SetOracle::Translate { inner, shift } => {
                let y: Point = x.iter().zip(shift).map(|(a, b)| a + b).collect();
                inner.d(&y, norm)
            }
            SetOracle::Product { factors } => {
                let mut off = 0;
                let mut acc: f64 = 0.0;
                for f in factors {
                    let k = f.dim();
                    let di = f.d(&x[off..off + k], norm);
                    off += k;
                    acc = match norm {
                        NormSpec::Max => acc.max(di),
                        NormSpec::Euclidean => acc.hypot(di),
                    };
                }
                acc
            }
            SetOracle::Cylinder { ambient, inner } => inner.d(&x[ambient - inner.dim()..], norm),
            SetOracle::Points { points, .. } => points
                .iter()
                .map(|p| norm.dist(p, x))
                .fold(f64::INFINITY, f64::min),
        }
    }

    pub fn contains(&self, x: &[f64], tol: f64, norm: NormSpec) -> bool {
        self.d(x, norm) <= tol
    }

    pub fn project(&self, x: &[f64], norm: NormSpec) -> Result<Point> {
        check_dim(self.dim(), x)?;
        if let SetOracle::Points { points, .. } = self {
            if points.is_empty() {
                return Err(Error::EmptySet);
            }
        }
        if self.is_empty() {
            return Err(Error::EmptySet);
        }
        Ok(self.project_unchecked(x, norm))
    }

    fn is_empty(&self) -> bool {
        match self {
            SetOracle::Points { points, .. } => points.is_empty(),
            SetOracle::Translate { inner, .. } | SetOracle::Cylinder { inner, .. } => {
                inner.is_empty()
            }
            SetOracle::Product { factors } => factors.iter().any(|f| f.is_empty()),
            _ => false,
        }
    }

    pub(crate) fn project_unchecked(&self, x: &[f64], norm: NormSpec) -> Point {
        match self {
            SetOracle::Whole { .. } => x.to_vec(),
            SetOracle::HalfSpace { normal, offset } => {
                let gap = offset - dot(normal, x);
                if gap <= 0.0 {
                    x.to_vec()
                } else {
                    step_along_normal(normal, x, gap, norm)
                }
            }
            SetOracle::Hyperplane { normal, offset } => {
                let gap = offset - dot(normal, x);
                step_along_normal(normal, x, gap, norm)
            }
            SetOracle::AffineLine { point, direction } => {
                let mut best: Option<(Point, f64)> = None;
                for t in curve::line_candidates(point, direction, x, norm) {
                    let p: Point = point
                        .iter()
                        .zip(direction)
                        .map(|(a, v)| a + t * v)
                        .collect();
                    if better_nd(norm, x, &p, best.as_ref()) {
                        let d = norm.dist(&p, x);
                        best = Some((p, d));
                    }
                }
                best.expect("nonzero direction").0
            }
            SetOracle::Ball { center, radius } => {
                let r = norm.dist(x, center);
                if r <= *radius {
                    x.to_vec()
                } else {
                    center
                        .iter()
                        .zip(x)
                        .map(|(c, xi)| c + (xi - c) * radius / r)
                        .collect()
                }
            }
            SetOracle::EpigraphPoly { .. }
            | SetOracle::CurveGraph { .. }
            | SetOracle::PowerCusp { .. } => {
                let (piece, sense) = self.graph_piece().expect("graph shape");
                if inside_graph_region(&piece, sense, x) {
                    return x.to_vec();
                }
                piece.nearest(planar(x), norm).0.to_vec()
            }
            SetOracle::Translate { inner, shift } => {
                let y: Point = x.iter().zip(shift).map(|(a, b)| a + b).collect();
                inner
                    .project_unchecked(&y, norm)
                    .iter()
                    .zip(shift)
                    .map(|(a, b)| a - b)
                    .collect()
            }
            SetOracle::Product { factors } => {
                let mut off = 0;
                let mut out = Vec::with_capacity(x.len());
                for f in factors {
                    let k = f.dim();
                    out.extend(f.project_unchecked(&x[off..off + k], norm));
                    off += k;
                }
                out
            }
            SetOracle::Cylinder { ambient, inner } => {
                let lead = ambient - inner.dim();
                let mut out = x[..lead].to_vec();
                out.extend(inner.project_unchecked(&x[lead..], norm));
                out
            }
            SetOracle::Points { points, .. } => {
                let mut best: Option<(Point, f64)> = None;
                for p in points {
                    if better_nd(norm, x, p, best.as_ref()) {
                        best = Some((p.clone(), norm.dist(p, x)));
                    }
                }
                best.expect("nonempty point set").0
            }
        }
    }

    /// Boundary pieces of a planar set, when all of them are lines, graphs or points.
    pub(crate) fn pieces(&self, norm: NormSpec) -> Option<Vec<Piece>> {
        if self.dim() != 2 {
            return None;
        }
        match self {
            SetOracle::Whole { .. } => Some(Vec::new()),
            SetOracle::HalfSpace { normal, offset } | SetOracle::Hyperplane { normal, offset } => {
                let nn = normal[0] * normal[0] + normal[1] * normal[1];
                Some(vec![Piece::Line {
                    p: [normal[0] * offset / nn, normal[1] * offset / nn],
                    v: [-normal[1], normal[0]],
                }])
            }
            SetOracle::AffineLine { point, direction } => Some(vec![Piece::Line {
                p: planar(point),
                v: planar(direction),
            }]),
            SetOracle::Ball { center, radius } if norm == NormSpec::Max => Some(vec![
                Piece::Line {
                    p: [center[0] - radius, 0.0],
                    v: [0.0, 1.0],
                },
                Piece::Line {
                    p: [center[0] + radius, 0.0],
                    v: [0.0, 1.0],
                },
                Piece::Line {
                    p: [0.0, center[1] - radius],
                    v: [1.0, 0.0],
                },
                Piece::Line {
                    p: [0.0, center[1] + radius],
                    v: [1.0, 0.0],
                },
            ]),
            SetOracle::Ball { .. } => None,
            SetOracle::EpigraphPoly { .. }
            | SetOracle::CurveGraph { .. }
            | SetOracle::PowerCusp { .. } => Some(vec![self.graph_piece()?.0]),
            SetOracle::Translate { inner, shift } => Some(
                inner
                    .pieces(norm)?
                    .iter()
                    .map(|p| p.translate([-shift[0], -shift[1]]))
                    .collect(),
            ),
            SetOracle::Points { points, .. } => {
                Some(points.iter().map(|p| Piece::Point(planar(p))).collect())
            }
            SetOracle::Cylinder { ambient: 2, inner } if inner.dim() == 1 => Some(
                inner
                    .boundary_points_1d()?
                    .into_iter()
                    .map(|b| Piece::Line {
                        p: [0.0, b],
                        v: [1.0, 0.0],
                    })
                    .collect(),
            ),
            SetOracle::Cylinder { ambient: 2, inner } if inner.dim() == 2 => inner.pieces(norm),
            SetOracle::Cylinder { .. } => Some(Vec::new()),
            SetOracle::Product { factors } => match factors.as_slice() {
                [f] => f.pieces(norm),
                [a, b] if a.dim() == 1 && b.dim() == 1 => {
                    let mut out: Vec<Piece> = a
                        .boundary_points_1d()?
                        .into_iter()
                        .map(|t| Piece::Line {
                            p: [t, 0.0],
                            v: [0.0, 1.0],
                        })
                        .collect();
                    out.extend(b.boundary_points_1d()?.into_iter().map(|t| Piece::Line {
                        p: [0.0, t],
                        v: [1.0, 0.0],
                    }));
                    Some(out)
                }
                _ => None,
            },
        }
    }

    fn boundary_points_1d(&self) -> Option<Vec<f64>> {
        match self {
            SetOracle::Whole { .. } | SetOracle::AffineLine { .. } => Some(Vec::new()),
            SetOracle::HalfSpace { normal, offset } | SetOracle::Hyperplane { normal, offset } => {
                Some(vec![offset / normal[0]])
            }
            SetOracle::Ball { center, radius } => {
                Some(vec![center[0] - radius, center[0] + radius])
            }
            SetOracle::Points { points, .. } => Some(points.iter().map(|p| p[0]).collect()),
            SetOracle::Translate { inner, shift } => Some(
                inner
                    .boundary_points_1d()?
                    .into_iter()
                    .map(|b| b - shift[0])
                    .collect(),
            ),
            SetOracle::Product { factors } if factors.len() == 1 => factors[0].boundary_points_1d(),
            _ => None,
        }
    }

    /// `n` points of the set within `radius` of `center`, drawn by projecting
    /// uniform points of the ball. Deterministic in `seed`.
    pub fn sample_near(
        &self,
        center: &[f64],
        radius: f64,
        n: usize,
        seed: u64,
        norm: NormSpec,
    ) -> Result<Vec<Point>> {
        check_dim(self.dim(), center)?;
        if !(radius > 0.0) {
            return Err(invalid("sampling radius must be positive"));
        }
        let mut rng = stream(seed, 0);
        let tol = self.tol(norm).max(1e-12);
        let mut out = Vec::with_capacity(n);
        let budget = 200 * n.max(1);
        let mut attempts = 0;
        while out.len() < n && attempts < budget {
            attempts += 1;
            let u = crate::rng::uniform_in_ball(&mut rng, center, radius, norm);
            let p = if let SetOracle::Points { points, .. } = self {
                if points.is_empty() {
                    break;
                }
                points[rng.gen_range(0..points.len())].clone()
            } else {
                self.project_unchecked(&u, norm)
            };
            if norm.dist(&p, center) < radius && self.contains(&p, tol, norm) {
                out.push(p);
            }
        }
        if out.len() < n {
            return Err(Error::SamplerExhausted {
                attempts,
                found: out.len(),
                wanted: n,
            });
        }
        Ok(out)
    }
}

fn inside_graph_region(piece: &Piece, sense: Option<Sense>, x: &[f64]) -> bool {
    let Piece::Graph { g, a } = piece else {
        return false;
    };
    let v = g.eval(x[0] - a[0]) + a[1];
    match sense {
        Some(Sense::Ge) => x[1] >= v,
        Some(Sense::Le) => x[1] <= v,
        None => x[1] == v,
    }
}

/// Nearest point of `{⟨a, y⟩ = ⟨a, x⟩ + gap}`: a signed step along the normal
/// (Euclidean) or along its sign pattern (max norm, which keeps coordinates
/// with zero normal component fixed).
fn step_along_normal(a: &[f64], x: &[f64], gap: f64, norm: NormSpec) -> Point {
    match norm {
        NormSpec::Euclidean => {
            let nn: f64 = a.iter().map(|v| v * v).sum();
            x.iter().zip(a).map(|(xi, ai)| xi + gap * ai / nn).collect()
        }
        NormSpec::Max => {
            let l1: f64 = a.iter().map(|v| v.abs()).sum();
            x.iter()
                .zip(a)
                .map(|(xi, ai)| {
                    if *ai == 0.0 {
                        *xi
                    } else {
                        xi + gap * ai.signum() / l1
                    }
                })
                .collect()
        }
    }
}

fn better_nd(norm: NormSpec, x: &[f64], cand: &[f64], best: Option<&(Point, f64)>) -> bool {
    let d = norm.dist(cand, x);
    match best {
        None => true,
        Some((b, db)) => {
            let slack = 1e-13 * db.max(1e-300);
            if d < db - slack {
                return true;
            }
            if d > db + slack {
                return false;
            }
            let (ec, eb) = (
                NormSpec::Euclidean.dist(cand, x),
                NormSpec::Euclidean.dist(b, x),
            );
            if ec != eb {
                return ec < eb;
            }
            crate::geometry::lex_less(cand, b)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MAX: NormSpec = NormSpec::Max;

    #[test]
    fn halfspace_distance_and_projection() {
        let h = SetOracle::half_space(vec![0.0, 1.0], 0.0);
        assert_eq!(h.dist(&[3.0, -2.0], MAX).unwrap(), 2.0);
        assert_eq!(h.project(&[3.0, -2.0], MAX).unwrap(), vec![3.0, 0.0]);
    }

    #[test]
    fn ball_projection_euclidean() {
        let b = SetOracle::Ball {
            center: vec![0.0, 0.0],
            radius: 1.0,
        };
        assert_eq!(
            b.project(&[2.0, 0.0], NormSpec::Euclidean).unwrap(),
            vec![1.0, 0.0]
        );
    }

    #[test]
    fn empty_point_set() {
        let e = SetOracle::Points {
            dim: 2,
            points: vec![],
        };
        assert_eq!(e.dist(&[1.0, 2.0], MAX).unwrap(), f64::INFINITY);
        assert_eq!(e.project(&[1.0, 2.0], MAX), Err(Error::EmptySet));
    }

    #[test]
    fn curve_distance_closed_form() {
        let c = SetOracle::curve(vec![0.0, 0.0, 1.0]);
        let eps = 0.042_893_218_813_452_5;
        let t = (eps + 0.25f64).sqrt() - 0.5;
        assert!((c.dist(&[0.0, eps], MAX).unwrap() - t).abs() < 1e-15);
    }

    #[test]
    fn translate_convention() {
        let h = SetOracle::half_space(vec![0.0, 1.0], 0.0);
        let t = h.translated(&[0.0, -0.5]);
        // Ω − (0, −0.5) = {ξ2 ≥ 0.5}
        assert_eq!(t.dist(&[0.0, 0.0], MAX).unwrap(), 0.5);
        assert_eq!(t.project(&[1.0, 0.0], MAX).unwrap(), vec![1.0, 0.5]);
    }

    #[test]
    fn cusp_membership() {
        let plus = SetOracle::PowerCusp {
            gamma: 1.0,
            q: 2.0,
            sign: CuspSign::Plus,
        };
        assert!(plus.contains(&[0.25, -0.5], 1e-12, MAX));
        assert!(!plus.contains(&[0.25, -0.6], 1e-12, MAX));
        let minus = SetOracle::PowerCusp {
            gamma: 1.0,
            q: 2.0,
            sign: CuspSign::Minus,
        };
        assert!(minus.contains(&[0.25, 0.5], 1e-12, MAX));
        assert!(!minus.contains(&[0.25, 0.6], 1e-12, MAX));
    }

    #[test]
    fn cylinder_and_product() {
        let cyl = SetOracle::Cylinder {
            ambient: 2,
            inner: Box::new(SetOracle::point(vec![0.0])),
        };
        assert_eq!(cyl.dist(&[5.0, 0.25], MAX).unwrap(), 0.25);
        let prod = SetOracle::Product {
            factors: vec![SetOracle::point(vec![1.0]), SetOracle::Whole { dim: 1 }],
        };
        assert_eq!(prod.dist(&[0.0, 9.0], MAX).unwrap(), 1.0);
    }

    #[test]
    fn sampler_on_singleton_repeats_point() {
        let s = SetOracle::point(vec![0.0, 0.0]);
        let pts = s.sample_near(&[0.0, 0.0], 0.3, 4, 1, MAX).unwrap();
        assert!(pts.iter().all(|p| p == &vec![0.0, 0.0]));
        let far = SetOracle::point(vec![5.0, 0.0]);
        assert!(matches!(
            far.sample_near(&[0.0, 0.0], 0.3, 2, 1, MAX),
            Err(Error::SamplerExhausted { .. })
        ));
    }
}
