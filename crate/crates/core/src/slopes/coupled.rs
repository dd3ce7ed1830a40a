use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{ShellRow, SlopeEstimate, SlopeQuery};
use crate::error::{invalid, Error, Result};
use crate::gauges::Gauge;
use crate::geometry::{add, check_dim, sub, NormSpec, Point};
use crate::rng::{at_radius, direction, log_uniform, stream};
use crate::sets::intersection::bounds_unchecked;
use crate::sets::SetOracle;

/// A point `(ω₁, …, ωₙ, x)` of the product space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub omegas: Vec<Point>,
    pub x: Point,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlopeMode {
    Local,
    Nonlocal,
}

/// `f̂(u₁, …, uₙ, u) = φ(maxᵢ‖uᵢ − xᵢ − u‖)` on `Ω₁ × ⋯ × Ωₙ × X`, `+∞` off it,
/// measured with `‖(u₁, …, uₙ, u)‖_γ = max{‖u‖, γ·maxᵢ‖uᵢ‖}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoupledObjective {
    pub gauge: Gauge,
    pub sets: Vec<SetOracle>,
    /// Empty means all shifts are zero.
    #[serde(default)]
    pub shifts: Vec<Point>,
    pub gamma: f64,
    #[serde(default)]
    pub norm: NormSpec,
}

impl CoupledObjective {
    pub fn new(
        gauge: Gauge,
        sets: Vec<SetOracle>,
        shifts: Vec<Point>,
        gamma: f64,
        norm: NormSpec,
    ) -> Result<Self> {
        let o = CoupledObjective {
            gauge,
            sets,
            shifts,
            gamma,
            norm,
        };
        o.validate()?;
        Ok(o)
    }

    pub fn validate(&self) -> Result<()> {
        self.gauge.validate()?;
        if self.sets.is_empty() {
            return Err(invalid("coupled objective needs at least one set"));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(invalid("γ must be positive"));
        }
        let d = self.sets[0].dim();
        for s in &self.sets {
            s.validate()?;
            if s.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: s.dim(),
                });
            }
        }
        if !self.shifts.is_empty() {
            if self.shifts.len() != self.sets.len() {
                return Err(invalid("one shift per set"));
            }
            for x in &self.shifts {
                check_dim(d, x)?;
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.sets.len()
    }

    pub fn dim(&self) -> usize {
        self.sets[0].dim()
    }

    fn check_config(&self, c: &Config) -> Result<()> {
        if c.omegas.len() != self.n() {
            return Err(invalid("one anchor per set"));
        }
        check_dim(self.dim(), &c.x)?;
        c.omegas.iter().try_for_each(|w| check_dim(self.dim(), w))
    }

    fn shift(&self, i: usize) -> Option<&Point> {
        self.shifts.get(i)
    }

    /// `maxᵢ‖uᵢ − xᵢ − u‖`
    pub fn spread(&self, c: &Config) -> f64 {
        c.omegas
            .iter()
            .enumerate()
            .map(|(i, w)| {
                let y = match self.shift(i) {
                    Some(s) => sub(w, s),
                    None => w.clone(),
                };
                self.norm.dist(&y, &c.x)
            })
            .fold(0.0, f64::max)
    }

    pub(crate) fn member(&self, i: usize, p: &[f64]) -> bool {
        let s = &self.sets[i];
        s.d(p, self.norm) <= s.tol(self.norm).max(1e-12) * (1.0 + self.norm.of(p))
    }

    pub fn feasible(&self, c: &Config) -> bool {
        c.omegas.iter().enumerate().all(|(i, w)| self.member(i, w))
    }

    /// Unrestricted value `f`.
    pub fn raw_value(&self, c: &Config) -> f64 {
        self.gauge.at(self.spread(c))
    }

    /// Restricted value `f̂`.
    pub fn value(&self, c: &Config) -> f64 {
        if self.feasible(c) {
            self.raw_value(c)
        } else {
            f64::INFINITY
        }
    }

    /// γ-norm distance.
    pub fn dist(&self, a: &Config, b: &Config) -> f64 {
        let w = a
            .omegas
            .iter()
            .zip(&b.omegas)
            .map(|(p, q)| self.norm.dist(p, q))
            .fold(0.0, f64::max);
        self.norm.dist(&a.x, &b.x).max(self.gamma * w)
    }

    /// `sup [f̂(at) − f̂(c)]₊ / d_γ(at, c)` over explicit candidates.
    pub fn nonlocal_over(&self, at: &Config, candidates: &[Config]) -> f64 {
        let fa = self.value(at);
        candidates
            .iter()
            .filter_map(|c| {
                let d = self.dist(at, c);
                (d > 0.0).then(|| (fa - self.value(c)).max(0.0) / d)
            })
            .fold(0.0, f64::max)
    }

    /// `maxᵢ‖ωᵢ − xᵢ − x‖` after `(ωᵢ − xᵢ)` and `x` are moved by `t`
    /// toward the candidate, with `uᵢ` re-projected; ratio of the decrease
    /// of the spread to the γ-distance, for the C¹ slope form.
    pub(crate) fn spread_rate(&self, at: &Config, toward: &Config, t: f64) -> Option<f64> {
        let c = Config {
            omegas: at
                .omegas
                .iter()
                .zip(&toward.omegas)
                .enumerate()
                .map(|(i, (w, v))| {
                    let p: Point = w.iter().zip(v).map(|(a, b)| a + t * (b - a)).collect();
                    self.sets[i].project_unchecked(&p, self.norm)
                })
                .collect(),
            x: at
                .x
                .iter()
                .zip(&toward.x)
                .map(|(a, b)| a + t * (b - a))
                .collect(),
        };
        let d = self.dist(at, &c);
        (d > 0.0).then(|| (self.spread(at) - self.spread(&c)) / d)
    }
}

/// Slope (`Local`) or nonlocal slope of `f̂` at `at`. Set components are
/// drawn near `ωᵢ` with [`SetOracle::sample_near`] at radius `r/γ`, the free
/// component at radius up to `r`.
pub fn gamma_slope(
    obj: &CoupledObjective,
    at: &Config,
    mode: SlopeMode,
    q: &SlopeQuery,
) -> Result<SlopeEstimate> {
    obj.validate()?;
    q.validate()?;
    obj.check_config(at)?;
    if !obj.feasible(at) {
        return Err(Error::Domain("anchor lies outside its sets".into()));
    }
    let fa = obj.value(at);
    let mut shells = Vec::with_capacity(q.shells + 1);
    for k in 0..=q.shells {
        let r = q.radius(k);
        let mut rng = stream(q.seed, k as u64);
        let mut per_set = Vec::with_capacity(obj.n());
        for (i, s) in obj.sets.iter().enumerate() {
            let seed = q.seed ^ ((k as u64) << 32 | i as u64);
            per_set.push(s.sample_near(
                &at.omegas[i],
                r / obj.gamma,
                q.per_shell,
                seed,
                obj.norm,
            )?);
        }
        let mut sup: f64 = 0.0;
        for j in 0..q.per_shell {
            let scale = if j == 0 { 1.0 } else { rng.gen_range(0.5..1.0) };
            let v = direction(&mut rng, at.x.len(), obj.norm);
            let c = Config {
                omegas: per_set.iter().map(|ps| ps[j].clone()).collect(),
                x: at
                    .x
                    .iter()
                    .zip(&v)
                    .map(|(a, b)| a + r * scale * b)
                    .collect(),
            };
            let d = obj.dist(at, &c);
            if d > 0.0 {
                sup = sup.max((fa - obj.value(&c)).max(0.0) / d);
            }
        }
        shells.push(ShellRow { radius: r, sup });
    }
    let value = match mode {
        SlopeMode::Local => shells.last().map_or(0.0, |s| s.sup),
        SlopeMode::Nonlocal => shells.iter().map(|s| s.sup).fold(0.0, f64::max),
    };
    Ok(SlopeEstimate { value, shells })
}

/// Nearest points of the zero set `{uᵢ − xᵢ = u}` of the objective.
pub(crate) enum ZeroSet {
    /// Closed form of `⋂(Ωᵢ − xᵢ)`.
    Declared(SetOracle),
    Sets(Vec<SetOracle>),
}

const ZERO_RESTARTS: usize = 4;

impl ZeroSet {
    pub fn of(obj: &CoupledObjective, declared: Option<&SetOracle>) -> Self {
        let unshifted = obj.shifts.iter().all(|s| s.iter().all(|v| *v == 0.0));
        match declared {
            Some(d) if unshifted => ZeroSet::Declared(d.clone()),
            _ => ZeroSet::Sets(
                obj.sets
                    .iter()
                    .enumerate()
                    .map(|(i, s)| match obj.shift(i) {
                        Some(x) => s.translated(x),
                        None => s.clone(),
                    })
                    .collect(),
            ),
        }
    }

    /// A nearest point of the zero set to `q`, if one is found.
    pub fn nearest(&self, q: &[f64], norm: NormSpec, seed: u64) -> Option<Point> {
        match self {
            ZeroSet::Declared(s) => Some(s.project_unchecked(q, norm)),
            ZeroSet::Sets(sets) => bounds_unchecked(sets, q, norm, ZERO_RESTARTS, seed).nearest,
        }
    }

    /// Lower bound on the distance from `q` to the zero set.
    pub fn dist_lower(&self, q: &[f64], norm: NormSpec, seed: u64) -> f64 {
        match self {
            ZeroSet::Declared(s) => s.d(q, norm),
            ZeroSet::Sets(sets) => {
                let b = bounds_unchecked(sets, q, norm, ZERO_RESTARTS, seed);
                if b.exact {
                    b.upper
                } else {
                    b.lower
                }
            }
        }
    }
}

/// Candidate moves from a configuration, used both for the descent and for
/// the sampled nonlocal slope.
pub(crate) struct Moves<'a> {
    pub obj: &'a CoupledObjective,
    pub zeros: &'a ZeroSet,
}

fn center(norm: NormSpec, pts: &[&Point]) -> Point {
    let d = pts[0].len();
    match norm {
        NormSpec::Max => (0..d)
            .map(|k| {
                let lo = pts.iter().map(|p| p[k]).fold(f64::INFINITY, f64::min);
                let hi = pts.iter().map(|p| p[k]).fold(f64::NEG_INFINITY, f64::max);
                0.5 * (lo + hi)
            })
            .collect(),
        NormSpec::Euclidean => (0..d)
            .map(|k| pts.iter().map(|p| p[k]).sum::<f64>() / pts.len() as f64)
            .collect(),
    }
}

fn lerp(a: &[f64], b: &[f64], t: f64) -> Point {
    a.iter().zip(b).map(|(p, q)| p + t * (q - p)).collect()
}

impl Moves<'_> {
    fn shifted(&self, at: &Config) -> Vec<Point> {
        at.omegas
            .iter()
            .enumerate()
            .map(|(i, w)| match self.obj.shift(i) {
                Some(s) => sub(w, s),
                None => w.clone(),
            })
            .collect()
    }

    fn lift(&self, z: &[f64]) -> Config {
        Config {
            omegas: (0..self.obj.n())
                .map(|i| match self.obj.shift(i) {
                    Some(s) => add(z, s),
                    None => z.to_vec(),
                })
                .collect(),
            x: z.to_vec(),
        }
    }

    fn project(&self, i: usize, p: &[f64]) -> Point {
        self.obj.sets[i].project_unchecked(p, self.obj.norm)
    }

    /// Best zero of the objective found near `at`, by γ-distance.
    fn best_zero(&self, at: &Config, rng: &mut ChaCha8Rng) -> Option<(Config, f64)> {
        let norm = self.obj.norm;
        let ys = self.shifted(at);
        let mut queries: Vec<Point> = vec![at.x.clone()];
        queries.extend(ys.iter().cloned());
        let mut all: Vec<&Point> = ys.iter().collect();
        all.push(&at.x);
        queries.push(center(norm, &all));
        let seed: u64 = rng.gen();
        let mut best: Option<(Point, Config, f64)> = None;
        let offer = |q: Point, best: &mut Option<(Point, Config, f64)>| {
            if let Some(z) = self.zeros.nearest(&q, norm, seed) {
                let c = self.lift(&z);
                let d = self.obj.dist(at, &c);
                if best.as_ref().map_or(true, |b| d < b.2) {
                    *best = Some((q, c, d));
                }
            }
        };
        for q in queries {
            offer(q, &mut best);
        }
        let (q0, _, d0) = best.clone()?;
        let mut q = q0;
        let mut step = d0;
        for _ in 0..6 {
            step *= 0.5;
            let cand = add(&q, &at_radius(rng, q.len(), step, norm));
            offer(cand, &mut best);
            q = best.as_ref().expect("set above").0.clone();
        }
        best.map(|(_, c, d)| (c, d))
    }

    /// Candidate configurations around `at`; `extra` adds random moves.
    pub fn candidates(&self, at: &Config, rng: &mut ChaCha8Rng, extra: usize) -> Vec<Config> {
        let norm = self.obj.norm;
        let n = self.obj.n();
        let mut out = Vec::new();
        let ys = self.shifted(at);
        let scale = self.obj.spread(at).max(1e-12);

        let zero = self.best_zero(at, rng);
        if let Some((z, _)) = &zero {
            for t in [0.0625, 0.125, 0.25, 0.5, 0.75] {
                out.push(Config {
                    omegas: (0..n)
                        .map(|i| self.project(i, &lerp(&at.omegas[i], &z.omegas[i], t)))
                        .collect(),
                    x: lerp(&at.x, &z.x, t),
                });
            }
            out.push(z.clone());
        }

        let refs: Vec<&Point> = ys.iter().collect();
        let c = center(norm, &refs);
        for t in [0.25, 0.5, 1.0] {
            let u = lerp(&at.x, &c, t);
            out.push(Config {
                omegas: at.omegas.clone(),
                x: u.clone(),
            });
            out.push(Config {
                omegas: (0..n)
                    .map(|i| {
                        let target = match self.obj.shift(i) {
                            Some(s) => add(&u, s),
                            None => u.clone(),
                        };
                        self.project(i, &target)
                    })
                    .collect(),
                x: u,
            });
        }
        // Each anchor pulled toward the free point.
        for t in [0.25, 0.5, 1.0] {
            out.push(Config {
                omegas: (0..n)
                    .map(|i| {
                        let target = match self.obj.shift(i) {
                            Some(s) => add(&at.x, s),
                            None => at.x.clone(),
                        };
                        self.project(i, &lerp(&at.omegas[i], &target, t))
                    })
                    .collect(),
                x: at.x.clone(),
            });
        }

        for _ in 0..extra {
            let r = log_uniform(rng, 1e-4 * scale, 2.0 * scale);
            let move_x: bool = rng.gen_bool(0.75);
            let x = if move_x {
                add(&at.x, &at_radius(rng, at.x.len(), r, norm))
            } else {
                at.x.clone()
            };
            let omegas = (0..n)
                .map(|i| {
                    if rng.gen_bool(0.5) {
                        let p = add(
                            &at.omegas[i],
                            &at_radius(rng, at.x.len(), r / self.obj.gamma, norm),
                        );
                        self.project(i, &p)
                    } else {
                        at.omegas[i].clone()
                    }
                })
                .collect();
            out.push(Config { omegas, x });
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn whole_plane(gamma: f64) -> CoupledObjective {
        CoupledObjective::new(
            Gauge::linear(1.0).unwrap(),
            vec![SetOracle::Whole { dim: 2 }, SetOracle::Whole { dim: 2 }],
            vec![],
            gamma,
            NormSpec::Max,
        )
        .unwrap()
    }

    #[test]
    fn global_minimum_has_zero_slope() {
        let obj = whole_plane(1.0);
        let at = Config {
            omegas: vec![vec![0.3, 0.1], vec![0.3, 0.1]],
            x: vec![0.3, 0.1],
        };
        assert_eq!(obj.value(&at), 0.0);
        for mode in [SlopeMode::Local, SlopeMode::Nonlocal] {
            let s = gamma_slope(&obj, &at, mode, &SlopeQuery::default()).unwrap();
            assert_eq!(s.value, 0.0);
        }
    }

    #[test]
    fn anchor_outside_sets_is_an_error() {
        let obj = CoupledObjective::new(
            Gauge::linear(1.0).unwrap(),
            vec![SetOracle::point(vec![0.0, 0.0])],
            vec![],
            1.0,
            NormSpec::Max,
        )
        .unwrap();
        let at = Config {
            omegas: vec![vec![1.0, 0.0]],
            x: vec![0.0, 0.0],
        };
        assert!(gamma_slope(&obj, &at, SlopeMode::Nonlocal, &SlopeQuery::default()).is_err());
    }
}
