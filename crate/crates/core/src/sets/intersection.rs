//! Distance from a point to the intersection of several sets, reported as a
//! bound pair.
//!
//! The lower bound is the largest single-set distance. The upper bound is the
//! distance to the best feasible point found. In the plane, when every set has
//! line/graph/point boundary pieces, the candidate list provably contains a
//! nearest point of the intersection, so the upper bound is exact, and an
//! empty candidate list within a reach raises the lower bound to that reach.
//! Otherwise the upper bound comes from cyclic projections with seeded
//! restarts.
//!
//! [`separation`] complements both: it decides by branch and bound whether
//! the intersection meets a ball, using only single-set distances and their
//! 1-Lipschitz property.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::{Piece, SetOracle};
use crate::geometry::{NormSpec, Point};
use crate::rng::{stream, uniform_in_ball};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub upper: f64,
    pub lower: f64,
    /// Feasible point realizing `upper`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nearest: Option<Point>,
    /// Whether `upper` is the exact distance (up to oracle tolerance).
    pub exact: bool,
}

impl Bounds {
    fn exact_at(d: f64, p: Option<Point>) -> Self {
        Bounds {
            upper: d,
            lower: d,
            nearest: p,
            exact: true,
        }
    }
}

const AP_ITERS: usize = 400;

fn feas_tol(s: &SetOracle, p: &[f64], norm: NormSpec) -> f64 {
    let scale = 1.0 + norm.of(p);
    s.tol(norm).max(1e-12) * scale
}

pub(crate) fn feasible(sets: &[SetOracle], p: &[f64], norm: NormSpec) -> bool {
    sets.iter().all(|s| s.d(p, norm) <= feas_tol(s, p, norm))
}

/// Bounds on `d(x, ⋂ sets)`. `budget` caps the number of projection restarts
/// used when no exact planar enumeration is available.
pub fn dist_intersection(
    sets: &[SetOracle],
    x: &[f64],
    norm: NormSpec,
    budget: usize,
    seed: u64,
) -> crate::Result<Bounds> {
    if sets.is_empty() {
        return Err(crate::error::invalid("intersection of zero sets"));
    }
    for s in sets {
        crate::geometry::check_dim(s.dim(), x)?;
    }
    Ok(bounds_unchecked(sets, x, norm, budget, seed))
}

pub(crate) fn bounds_unchecked(
    sets: &[SetOracle],
    x: &[f64],
    norm: NormSpec,
    budget: usize,
    seed: u64,
) -> Bounds {
    let lower = sets.iter().map(|s| s.d(x, norm)).fold(0.0, f64::max);
    if lower == f64::INFINITY {
        return Bounds::exact_at(f64::INFINITY, None);
    }
    if sets.len() == 1 {
        return Bounds::exact_at(lower, Some(sets[0].project_unchecked(x, norm)));
    }
    if feasible(sets, x, norm) {
        return Bounds::exact_at(0.0, Some(x.to_vec()));
    }

    let mut best: Option<(Point, f64)> = None;
    let offer = |p: Point, best: &mut Option<(Point, f64)>| {
        let d = norm.dist(&p, x);
        if best.as_ref().map_or(true, |b| d < b.1) && feasible(sets, &p, norm) {
            *best = Some((p, d));
        }
    };
    for s in sets {
        offer(s.project_unchecked(x, norm), &mut best);
    }

    let planar = x.len() == 2 && sets.iter().all(|s| s.pieces(norm).is_some());
    let mut exact = false;
    if planar {
        let pieces: Vec<Piece> = sets.iter().flat_map(|s| s.pieces(norm).unwrap()).collect();
        let mut reach = match &best {
            Some((_, d)) => *d * (1.0 + 1e-12) + 1e-300,
            None => 4.0 * lower.max(1.0),
        };
        let mut searched = 0.0;
        for _ in 0..4 {
            if let Some((p, d)) = nearest_candidate(sets, &pieces, x, norm, reach) {
                if best.as_ref().map_or(true, |b| d <= b.1) {
                    best = Some((p, d));
                }
            }
            if best.is_some() {
                exact = true;
                break;
            }
            searched = reach;
            reach *= 8.0;
        }
        let analytic = sets
            .iter()
            .all(|s| s.exactness(norm) == super::Exactness::Analytic);
        if best.is_none() && analytic && roots_complete(&pieces) {
            return Bounds {
                upper: f64::INFINITY,
                lower: lower.max(searched),
                nearest: None,
                exact: false,
            };
        }
    } else {
        let mut rng = stream(seed, 0);
        let mut starts = vec![x.to_vec()];
        let radius = best.as_ref().map_or(4.0 * lower.max(1e-3), |b| b.1);
        for _ in 0..budget {
            starts.push(uniform_in_ball(&mut rng, x, radius, norm));
        }
        for st in starts {
            let p = cyclic_projections(sets, &st, norm);
            offer(p, &mut best);
        }
    }
    let exact = exact
        && sets
            .iter()
            .all(|s| s.exactness(norm) == super::Exactness::Analytic);
    match best {
        Some((p, d)) => Bounds {
            upper: d.max(lower),
            lower,
            nearest: Some(p),
            exact,
        },
        None => Bounds {
            upper: f64::INFINITY,
            lower,
            nearest: None,
            exact: false,
        },
    }
}

/// Whether piece intersections come from polynomial root isolation, so an
/// empty candidate list within a reach is a proof.
fn roots_complete(pieces: &[Piece]) -> bool {
    let cusps = pieces
        .iter()
        .filter(|p| {
            matches!(
                p,
                Piece::Graph {
                    g: super::curve::Profile::Cusp { .. },
                    ..
                }
            )
        })
        .count();
    let graphs = pieces
        .iter()
        .filter(|p| matches!(p, Piece::Graph { .. }))
        .count();
    cusps == 0 || graphs <= 1
}

/// Nearest feasible point among the local minimizers on each boundary piece
/// and the pairwise piece intersections with abscissa within `reach` of `x`.
fn nearest_candidate(
    sets: &[SetOracle],
    pieces: &[Piece],
    x: &[f64],
    norm: NormSpec,
    reach: f64,
) -> Option<(Point, f64)> {
    let xp = [x[0], x[1]];
    let mut cands: Vec<[f64; 2]> = Vec::new();
    for (i, p) in pieces.iter().enumerate() {
        cands.extend(p.local_minimizers(xp, norm, reach));
        for q in &pieces[i + 1..] {
            cands.extend(p.intersections(q, xp, reach));
        }
    }
    let mut scored: Vec<(f64, [f64; 2])> = cands
        .into_iter()
        .filter(|c| c[0].is_finite() && c[1].is_finite())
        .map(|c| (norm.dist(&c, &xp), c))
        .filter(|(d, _)| *d <= reach)
        .collect();
    scored.sort_by(|a, b| {
        a.0.total_cmp(&b.0)
            .then(a.1[0].total_cmp(&b.1[0]))
            .then(a.1[1].total_cmp(&b.1[1]))
    });
    scored
        .into_iter()
        .find(|(_, c)| feasible(sets, c, norm))
        .map(|(d, c)| (c.to_vec(), d))
}

/// Cyclic projections started at `start`.
pub(crate) fn cyclic_projections(sets: &[SetOracle], start: &[f64], norm: NormSpec) -> Point {
    let mut p = start.to_vec();
    for _ in 0..AP_ITERS {
        let before = p.clone();
        for s in sets {
            p = s.project_unchecked(&p, norm);
        }
        if norm.dist(&p, &before) <= 1e-15 * (1.0 + norm.of(&p)) {
            break;
        }
    }
    p
}

#[derive(Debug, Clone, PartialEq)]
pub enum Separation {
    /// No point of the intersection lies in the closed ball.
    Separated,
    /// A point of the intersection (up to oracle tolerance) inside the ball.
    Feasible(Point),
    /// The cell budget ran out before either was established.
    Unknown,
}

/// Decide whether `⋂ sets` meets the closed ball `B_rho(x)`.
///
/// Cubes covering the ball are pruned when `maxᵢ dᵢ(c) − tolᵢ` exceeds the
/// radius of the cube, which is sound because each `dᵢ` is 1-Lipschitz.
pub fn separation(
    sets: &[SetOracle],
    x: &[f64],
    rho: f64,
    norm: NormSpec,
    max_cells: usize,
) -> Separation {
    let d = x.len();
    if d == 0 || d > 6 || !(rho >= 0.0) {
        return Separation::Unknown;
    }
    let cover = norm.cover(d);
    let mut queue: VecDeque<(Point, f64)> = VecDeque::new();
    queue.push_back((x.to_vec(), rho));
    let mut processed = 0usize;
    while let Some((c, w)) = queue.pop_front() {
        processed += 1;
        if processed > max_cells {
            return Separation::Unknown;
        }
        if cube_gap(&c, w, x, norm) > rho {
            continue;
        }
        let mut margin = f64::NEG_INFINITY;
        for s in sets {
            let di = s.d(&c, norm);
            margin = margin.max(di - s.tol(norm));
        }
        if margin > w * cover {
            continue;
        }
        if norm.dist(&c, x) <= rho && feasible(sets, &c, norm) {
            return Separation::Feasible(c);
        }
        let h = 0.5 * w;
        for mask in 0..(1usize << d) {
            let child: Point = c
                .iter()
                .enumerate()
                .map(|(k, ck)| if mask >> k & 1 == 1 { ck + h } else { ck - h })
                .collect();
            queue.push_back((child, h));
        }
    }
    Separation::Separated
}

/// Distance from `x` to the cube of half-width `w` centered at `c`.
fn cube_gap(c: &[f64], w: f64, x: &[f64], norm: NormSpec) -> f64 {
    let gaps: Point = c
        .iter()
        .zip(x)
        .map(|(ck, xk)| ((ck - xk).abs() - w).max(0.0))
        .collect();
    norm.of(&gaps)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MAX: NormSpec = NormSpec::Max;

    fn axes() -> Vec<SetOracle> {
        vec![
            SetOracle::line(vec![0.0, 0.0], vec![1.0, 0.0]),
            SetOracle::line(vec![0.0, 0.0], vec![0.0, 1.0]),
        ]
    }

    #[test]
    fn axes_intersection_distance() {
        let b = dist_intersection(&axes(), &[3.0, 2.0], MAX, 4, 0).unwrap();
        assert_eq!((b.upper, b.lower), (3.0, 3.0));
    }

    #[test]
    fn empty_planar_intersection_has_large_lower_bound() {
        let sets = vec![
            SetOracle::CurveGraph {
                coeffs: vec![1e-9, 0.0, 1.0],
            },
            SetOracle::line(vec![0.0, 0.0], vec![1.0, 0.0]),
        ];
        let b = dist_intersection(&sets, &[0.0, 0.0], MAX, 4, 0).unwrap();
        assert_eq!(b.upper, f64::INFINITY);
        assert!(b.lower >= 1.0 && !b.exact, "{b:?}");
    }

    #[test]
    fn single_set_is_exact() {
        let h = vec![SetOracle::half_space(vec![0.0, 1.0], 0.0)];
        let b = dist_intersection(&h, &[3.0, -2.0], MAX, 4, 0).unwrap();
        assert_eq!((b.upper, b.lower), (2.0, 2.0));
    }

    #[test]
    fn shifted_half_plane_and_hypograph() {
        let eps: f64 = 0.5;
        let sets = vec![
            SetOracle::half_space(vec![0.0, 1.0], 0.0).translated(&[0.0, -eps]),
            SetOracle::hypograph(vec![0.0, 0.0, 1.0]).translated(&[0.0, eps]),
        ];
        let b = dist_intersection(&sets, &[0.0, 0.0], MAX, 4, 0).unwrap();
        assert!((b.upper - (2.0 * eps).sqrt()).abs() < 1e-12, "{b:?}");
        assert!(b.lower <= b.upper);
        let p = b.nearest.unwrap();
        assert!((p[0].abs() - 1.0).abs() < 1e-12 && (p[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn separation_detects_disjoint_shifted_parabolas() {
        let s = 1e-2;
        let sets = vec![
            SetOracle::epigraph(vec![0.0, 0.0, 1.0]).translated(&[0.0, -s]),
            SetOracle::hypograph(vec![0.0, 0.0, -1.0]).translated(&[0.0, s]),
        ];
        assert_eq!(
            separation(&sets, &[0.0, 0.0], 2.0 * s, MAX, 100_000),
            Separation::Separated
        );
        let b = dist_intersection(&sets, &[0.0, 0.0], MAX, 4, 0).unwrap();
        assert_eq!(b.upper, f64::INFINITY);
    }

    #[test]
    fn separation_finds_feasible_point() {
        let sets = vec![
            SetOracle::half_space(vec![0.0, 1.0], 0.0),
            SetOracle::half_space(vec![1.0, 0.0], 0.0),
        ];
        assert!(matches!(
            separation(&sets, &[-0.5, -0.5], 0.6, MAX, 10_000),
            Separation::Feasible(_)
        ));
        assert_eq!(
            separation(&sets, &[-0.5, -0.5], 0.4, MAX, 10_000),
            Separation::Separated
        );
    }

    #[test]
    fn projections_fallback_in_three_dimensions() {
        let sets = vec![
            SetOracle::half_space(vec![0.0, 0.0, 1.0], 0.0),
            SetOracle::half_space(vec![1.0, 0.0, 0.0], 0.0),
        ];
        let b = dist_intersection(&sets, &[-1.0, 0.3, -2.0], MAX, 4, 0).unwrap();
        assert!(b.lower <= b.upper && (b.upper - 2.0).abs() < 1e-12, "{b:?}");
    }
}
