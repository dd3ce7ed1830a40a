//! Planar boundary pieces (lines, graphs `ξ2 = g(ξ1)`, isolated points) and
//! exact nearest-point computations on them.
//!
//! A graph piece is `{(s + a0, g(s) + a1)}`. Distances to it reduce to a
//! one-parameter minimization whose local minimizers are enumerated as roots
//! of explicit equations, so the global minimum is found exactly up to root
//! precision.

use crate::geometry::NormSpec;
use crate::numeric::{
    convex_piece_roots, golden_multistart, poly_deriv, poly_eval, poly_roots, poly_shift, poly_sub,
    scan_roots,
};

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Profile {
    Poly(Vec<f64>),
    /// `sign·c·|s|^e`
    Cusp {
        c: f64,
        e: f64,
        sign: f64,
    },
}

impl Profile {
    pub fn eval(&self, s: f64) -> f64 {
        match self {
            Profile::Poly(c) => poly_eval(c, s),
            Profile::Cusp { c, e, sign } => sign * c * s.abs().powf(*e),
        }
    }

    /// Roots of `g(s) - k·s - c0` on `[lo, hi]`, plus tangency points.
    fn roots_minus_line(&self, k: f64, c0: f64, lo: f64, hi: f64) -> Vec<f64> {
        match self {
            Profile::Poly(c) => {
                let q = poly_sub(c, &[c0, k]);
                let mut r = poly_roots(&q, lo, hi);
                r.extend(poly_roots(&poly_deriv(&q), lo, hi));
                r
            }
            Profile::Cusp { .. } => {
                let f = |s: f64| self.eval(s) - k * s - c0;
                let mut r = Vec::new();
                if lo < 0.0 {
                    r.extend(convex_piece_roots(f, lo, hi.min(0.0)));
                }
                if hi > 0.0 {
                    r.extend(convex_piece_roots(f, lo.max(0.0), hi));
                }
                r
            }
        }
    }

    /// Candidate minimizers of `N(s - y0, g(s) - y1)` on `[lo, hi]`.
    fn distance_candidates(&self, y: [f64; 2], lo: f64, hi: f64, norm: NormSpec) -> Vec<f64> {
        let mut out = vec![lo, hi, y[0].clamp(lo, hi)];
        match self {
            Profile::Poly(c) => {
                let base = poly_sub(c, &[y[1]]);
                out.extend(poly_roots(&base, lo, hi));
                out.extend(poly_roots(&poly_sub(&base, &[-y[0], 1.0]), lo, hi));
                out.extend(poly_roots(&poly_sub(&base, &[y[0], -1.0]), lo, hi));
                let d = poly_deriv(c);
                out.extend(poly_roots(&d, lo, hi));
                if norm == NormSpec::Euclidean {
                    // (s - y0) + (p(s) - y1)·p'(s) = 0
                    let mut prod = vec![0.0; base.len() + d.len()];
                    for (i, bi) in base.iter().enumerate() {
                        for (j, dj) in d.iter().enumerate() {
                            prod[i + j] += bi * dj;
                        }
                    }
                    let stat = poly_sub(&prod, &[y[0], -1.0]);
                    out.extend(poly_roots(&stat, lo, hi));
                }
            }
            Profile::Cusp { .. } => {
                if lo < 0.0 && hi > 0.0 {
                    out.push(0.0);
                }
                match norm {
                    NormSpec::Max => {
                        out.extend(self.roots_minus_line(0.0, y[1], lo, hi));
                        out.extend(self.roots_minus_line(1.0, y[1] - y[0], lo, hi));
                        out.extend(self.roots_minus_line(-1.0, y[1] + y[0], lo, hi));
                    }
                    NormSpec::Euclidean => {
                        let h = |s: f64| (s - y[0]).hypot(self.eval(s) - y[1]);
                        out.extend(golden_multistart(h, lo, hi, 32).into_iter().map(|p| p.0));
                    }
                }
            }
        }
        out.retain(|s| s.is_finite() && *s >= lo && *s <= hi);
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Piece {
    /// `{p + t·v}`
    Line {
        p: [f64; 2],
        v: [f64; 2],
    },
    /// `{(s + a0, g(s) + a1)}`
    Graph {
        g: Profile,
        a: [f64; 2],
    },
    Point([f64; 2]),
}

fn n2(norm: NormSpec, a: [f64; 2], b: [f64; 2]) -> f64 {
    norm.dist(&a, &b)
}

fn eucl(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Deterministic tie-break: smallest distance, then Euclidean-closest, then lexicographic.
pub(crate) fn better(
    norm: NormSpec,
    x: [f64; 2],
    cand: [f64; 2],
    best: Option<([f64; 2], f64)>,
) -> bool {
    let d = n2(norm, x, cand);
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
            let (ec, eb) = (eucl(x, cand), eucl(x, b));
            if ec != eb {
                return ec < eb;
            }
            cand[0] < b[0] || (cand[0] == b[0] && cand[1] < b[1])
        }
    }
}

impl Piece {
    pub fn translate(&self, by: [f64; 2]) -> Piece {
        match self {
            Piece::Line { p, v } => Piece::Line {
                p: [p[0] + by[0], p[1] + by[1]],
                v: *v,
            },
            Piece::Graph { g, a } => Piece::Graph {
                g: g.clone(),
                a: [a[0] + by[0], a[1] + by[1]],
            },
            Piece::Point(q) => Piece::Point([q[0] + by[0], q[1] + by[1]]),
        }
    }

    /// Points of the piece that are local minimizers of the distance to `x`,
    /// including flat-segment endpoints, restricted to abscissae within `reach`.
    pub fn local_minimizers(&self, x: [f64; 2], norm: NormSpec, reach: f64) -> Vec<[f64; 2]> {
        match self {
            Piece::Point(q) => vec![*q],
            Piece::Line { p, v } => line_candidates(p, v, &x, norm)
                .into_iter()
                .map(|t| [p[0] + t * v[0], p[1] + t * v[1]])
                .collect(),
            Piece::Graph { g, a } => {
                let y = [x[0] - a[0], x[1] - a[1]];
                g.distance_candidates(y, y[0] - reach, y[0] + reach, norm)
                    .into_iter()
                    .map(|s| [s + a[0], g.eval(s) + a[1]])
                    .collect()
            }
        }
    }

    /// Nearest point of the piece to `x` and its distance.
    pub fn nearest(&self, x: [f64; 2], norm: NormSpec) -> ([f64; 2], f64) {
        let reach = match self {
            Piece::Graph { g, a } => {
                let y0 = x[0] - a[0];
                (g.eval(y0) + a[1] - x[1]).abs()
            }
            _ => f64::INFINITY,
        };
        if reach == 0.0 {
            return (x, 0.0);
        }
        let mut best: Option<([f64; 2], f64)> = None;
        for c in self.local_minimizers(x, norm, reach) {
            if better(norm, x, c, best) {
                best = Some((c, n2(norm, x, c)));
            }
        }
        best.expect("piece always yields a candidate")
    }

    /// Pairwise intersection points and near-tangencies with abscissa within
    /// `reach` of `x[0]` (all of them for line pairs).
    pub fn intersections(&self, other: &Piece, x: [f64; 2], reach: f64) -> Vec<[f64; 2]> {
        use Piece::*;
        match (self, other) {
            (Point(_), _) | (_, Point(_)) => Vec::new(),
            (Line { p, v }, Line { p: q, v: w }) => {
                let det = v[0] * w[1] - v[1] * w[0];
                if det.abs() <= 1e-15 * (v[0].hypot(v[1]) * w[0].hypot(w[1])) {
                    return Vec::new();
                }
                let r = [q[0] - p[0], q[1] - p[1]];
                let t = (r[0] * w[1] - r[1] * w[0]) / det;
                vec![[p[0] + t * v[0], p[1] + t * v[1]]]
            }
            (Line { p, v }, Graph { g, a }) | (Graph { g, a }, Line { p, v }) => {
                let (lo, hi) = (x[0] - reach - a[0], x[0] + reach - a[0]);
                if v[0].abs() <= 1e-15 * v[1].abs() {
                    let s = p[0] - a[0];
                    return vec![[p[0], g.eval(s) + a[1]]];
                }
                let k = v[1] / v[0];
                let c0 = p[1] - a[1] + k * (a[0] - p[0]);
                g.roots_minus_line(k, c0, lo, hi)
                    .into_iter()
                    .map(|s| [s + a[0], g.eval(s) + a[1]])
                    .collect()
            }
            (Graph { g, a }, Graph { g: h, a: b }) => {
                let (lo, hi) = (x[0] - reach, x[0] + reach);
                let us: Vec<f64> = match (g, h) {
                    (Profile::Poly(c1), Profile::Poly(c2)) => {
                        let mut d = poly_sub(&poly_shift(c1, a[0]), &poly_shift(c2, b[0]));
                        d[0] += a[1] - b[1];
                        let mut r = poly_roots(&d, lo, hi);
                        r.extend(poly_roots(&poly_deriv(&d), lo, hi));
                        r
                    }
                    _ => {
                        let f = |u: f64| g.eval(u - a[0]) + a[1] - h.eval(u - b[0]) - b[1];
                        let mut cuts = vec![lo];
                        for k in [a[0], b[0]] {
                            if k > lo && k < hi {
                                cuts.push(k);
                            }
                        }
                        cuts.push(hi);
                        cuts.sort_by(f64::total_cmp);
                        let mut r: Vec<f64> = cuts[1..cuts.len() - 1].to_vec();
                        for w in cuts.windows(2) {
                            r.extend(scan_roots(f, w[0], w[1], 256));
                        }
                        r
                    }
                };
                us.into_iter()
                    .map(|u| [u, g.eval(u - a[0]) + a[1]])
                    .collect()
            }
        }
    }
}

/// Breakpoints of `t ↦ ‖x - p - t·v‖` (max norm) or the orthogonal foot
/// (Euclidean); the minimum over the line is attained at one of them.
pub(crate) fn line_candidates(p: &[f64], v: &[f64], x: &[f64], norm: NormSpec) -> Vec<f64> {
    let c: Vec<f64> = x.iter().zip(p).map(|(a, b)| a - b).collect();
    match norm {
        NormSpec::Euclidean => {
            let vv: f64 = v.iter().map(|a| a * a).sum();
            vec![c.iter().zip(v).map(|(a, b)| a * b).sum::<f64>() / vv]
        }
        NormSpec::Max => {
            let mut ts = Vec::new();
            for j in 0..c.len() {
                for k in j..c.len() {
                    for sgn in [1.0, -1.0] {
                        let den = v[j] - sgn * v[k];
                        if den != 0.0 {
                            ts.push((c[j] - sgn * c[k]) / den);
                        }
                    }
                }
            }
            ts
        }
    }
}
