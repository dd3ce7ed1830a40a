//! The bundled example corpus, self-contained certification records that can
//! be rechecked from their JSON alone, and the CSV sidecar formats.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::certify::{self, margin_bins, PropertyQuery, Status, Verdict, Witness};
use crate::error::{Error, Result};
use crate::gauges::Gauge;
use crate::maps::{self, FnKind, GraphPoint, MappingOracle};
use crate::numeric::golden_min;
use crate::scenes;
use crate::sets::Scene;
use crate::slopes::ShellRow;

pub const TOOL: &str = "transversal";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Tolerance for the analytic sphere minimum of the opposite parabolas.
pub const SPHERE_CHECK_TOL: f64 = 1e-6;
/// Grid size of the brute-force search over the max-norm sphere.
pub const SPHERE_GRID: usize = 100_000;

/// A certification problem on a scene or on a mapping at a graph point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Task {
    Sets {
        scene: Scene,
        query: PropertyQuery,
    },
    Mapping {
        mapping: MappingOracle,
        base: GraphPoint,
        query: PropertyQuery,
    },
}

impl Task {
    pub fn query(&self) -> &PropertyQuery {
        match self {
            Task::Sets { query, .. } | Task::Mapping { query, .. } => query,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        match &mut self {
            Task::Sets { query, .. } | Task::Mapping { query, .. } => query.seed = seed,
        }
        self
    }

    pub fn run(&self) -> Result<Verdict> {
        match self {
            Task::Sets { scene, query } => certify::certify(scene, query),
            Task::Mapping {
                mapping,
                base,
                query,
            } => maps::certify_mapping(mapping, base, query),
        }
    }

    /// Recompute the violation claimed by `w` from scratch.
    pub fn recheck(&self, w: &Witness) -> Result<bool> {
        match self {
            Task::Sets { scene, query } => certify::recheck(scene, query, w),
            Task::Mapping {
                mapping,
                base,
                query,
            } => maps::recheck_mapping(mapping, base, query, w),
        }
    }
}

/// A task together with its verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub task: Task,
    pub verdict: Verdict,
}

impl Record {
    pub fn run(task: Task) -> Result<Self> {
        let verdict = task.run()?;
        Ok(Record { task, verdict })
    }

    /// `None` when there is no witness to recheck.
    pub fn recheck(&self) -> Result<Option<bool>> {
        match &self.verdict.witness {
            Some(w) => self.task.recheck(w).map(Some),
            None => Ok(None),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    /// Claimed in the literature.
    Paper,
    /// Established here by an independent computation.
    Derived,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Example {
    pub name: &'static str,
    pub description: &'static str,
    pub source: Source,
    pub task: Task,
    pub expected: Status,
    /// Radii `ε` at which the analytic sphere minimum is compared with brute force.
    pub sphere_checks: Vec<f64>,
}

/// `min_{‖x‖∞ = ε} max_i d(x, Ωᵢ)` by analytic formula and by brute force.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphereCheck {
    pub epsilon: f64,
    pub analytic: f64,
    pub brute_force: f64,
    pub diff: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExampleResult {
    pub name: String,
    pub description: String,
    pub source: Source,
    pub expected: Status,
    pub status: Status,
    pub matches: bool,
    pub tolerance: f64,
    #[serde(flatten)]
    pub record: Record,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sphere_checks: Vec<SphereCheck>,
}

impl ExampleResult {
    /// Status and every sphere check agree with expectations.
    pub fn passed(&self) -> bool {
        self.matches && self.sphere_checks.iter().all(|c| c.pass)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusReport {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub examples: Vec<ExampleResult>,
    /// Names of examples whose status or analytic checks disagree with expectations.
    pub mismatches: Vec<String>,
}

fn root(c: f64) -> Gauge {
    Gauge::scaled_root(c).expect("valid gauge")
}

fn lin(alpha: f64) -> Gauge {
    Gauge::linear(alpha).expect("valid gauge")
}

fn cube_root(c: f64) -> Gauge {
    Gauge::scaled_power(c, 1.0 / 3.0).expect("valid gauge")
}

fn sets(scene: Scene, query: PropertyQuery) -> Task {
    Task::Sets { scene, query }
}

fn cubic(query: PropertyQuery) -> Task {
    let mapping = MappingOracle::single_valued(FnKind::Cubic);
    let base = mapping.default_base();
    Task::Mapping {
        mapping,
        base,
        query,
    }
}

/// The named examples, in report order.
pub fn bundled_examples() -> Vec<Example> {
    let square = Gauge::scaled_power(1.0, 2.0).expect("valid gauge");
    let twice_square = Gauge::scaled_power(2.0, 2.0).expect("valid gauge");
    let sharp_cube = 2f64.powf(2.0 / 3.0) * 1.001;
    vec![
        Example {
            name: "2.1(q=2)",
            description: "power cusps q=2, gamma=1: semitransversal with t^2",
            source: Source::Paper,
            task: sets(
                scenes::cusps(2.0, 1.0),
                PropertyQuery::semi(square, 1.0).with_budget(10_000),
            ),
            expected: Status::HoldsOnSamples,
            sphere_checks: vec![],
        },
        Example {
            name: "2.1(q=2)-sharp",
            description: "power cusps q=2, gamma=1: semitransversal with 2t^2",
            source: Source::Derived,
            task: sets(
                scenes::cusps(2.0, 1.0),
                PropertyQuery::semi(twice_square, 1.0).with_budget(10_000),
            ),
            expected: Status::HoldsOnSamples,
            sphere_checks: vec![],
        },
        Example {
            name: "3.1",
            description:
                "half-plane and region under a parabola: semitransversal with sqrt(2t), delta=2",
            source: Source::Paper,
            task: sets(
                scenes::half_plane_under_parabola(),
                PropertyQuery::semi(root(2f64.sqrt()), 2.0).with_budget(10_000),
            ),
            expected: Status::HoldsOnSamples,
            sphere_checks: vec![],
        },
        Example {
            name: "3.2",
            description:
                "opposite parabolas: subtransversal with 1.1 sqrt(t), delta1=1, delta2=0.1",
            source: Source::Paper,
            task: sets(
                scenes::opposite_parabolas(),
                PropertyQuery::sub(root(1.1), 1.0, 0.1).with_budget(10_000),
            ),
            expected: Status::HoldsOnSamples,
            sphere_checks: vec![0.1, 0.25, 0.5],
        },
        Example {
            name: "axes-sub-linear",
            description: "coordinate axes: subtransversal with t",
            source: Source::Derived,
            task: sets(
                scenes::axes(),
                PropertyQuery::sub(lin(1.0), 1.0, 1.0).with_budget(4000),
            ),
            expected: Status::HoldsOnSamples,
            sphere_checks: vec![],
        },
        Example {
            name: "axes-sub-linear-1.5",
            description: "coordinate axes: subtransversality with t/1.5 fails",
            source: Source::Derived,
            task: sets(
                scenes::axes(),
                PropertyQuery::sub(lin(1.5), 1.0, 1.0).with_budget(4000),
            ),
            expected: Status::Falsified,
            sphere_checks: vec![],
        },
        Example {
            name: "crossing-lines-full-0.3",
            description: "lines of slope 1 and 2: transversal with t/0.3",
            source: Source::Derived,
            task: sets(
                scenes::crossing_lines(),
                PropertyQuery::full(lin(0.3), 0.1, 0.1).with_budget(4000),
            ),
            expected: Status::HoldsOnSamples,
            sphere_checks: vec![],
        },
        Example {
            name: "crossing-lines-full-0.4",
            description: "lines of slope 1 and 2: transversality with t/0.4 fails",
            source: Source::Derived,
            task: sets(
                scenes::crossing_lines(),
                PropertyQuery::full(lin(0.4), 0.1, 0.1).with_budget(4000),
            ),
            expected: Status::Falsified,
            sphere_checks: vec![],
        },
        Example {
            name: "tangent-parabolas-linear",
            description: "tangent parabolic regions: subtransversality with 2t fails",
            source: Source::Derived,
            task: sets(
                scenes::tangent_parabolas(),
                PropertyQuery::sub(lin(0.5), 0.5, 0.5).with_budget(2000),
            ),
            expected: Status::Falsified,
            sphere_checks: vec![],
        },
        Example {
            name: "singletons-semi",
            description: "two distinct points: semitransversality fails",
            source: Source::Derived,
            task: sets(
                scenes::singletons(),
                PropertyQuery::semi(lin(1.0), 1.0).with_budget(200),
            ),
            expected: Status::Falsified,
            sphere_checks: vec![],
        },
        Example {
            name: "cubic-mapping-semi",
            description: "x -> x^3: semiregular with t^(1/3)",
            source: Source::Derived,
            task: cubic(PropertyQuery::semi(cube_root(1.0), 1.0).with_budget(4000)),
            expected: Status::HoldsOnSamples,
            sphere_checks: vec![],
        },
        Example {
            name: "cubic-mapping-regular",
            description: "x -> x^3: regularity with t^(1/3) fails",
            source: Source::Derived,
            task: cubic(PropertyQuery::full(cube_root(1.0), 1.0, 0.5).with_budget(4000)),
            expected: Status::Falsified,
            sphere_checks: vec![],
        },
        Example {
            name: "cubic-mapping-regular-sharp",
            description: "x -> x^3: regular with 1.001 * 2^(2/3) t^(1/3)",
            source: Source::Derived,
            task: cubic(PropertyQuery::full(cube_root(sharp_cube), 1.0, 0.5).with_budget(4000)),
            expected: Status::HoldsOnSamples,
            sphere_checks: vec![],
        },
    ]
}

pub fn example(name: &str) -> Result<Example> {
    bundled_examples()
        .into_iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::InvalidParameter(format!("unknown example {name:?}")))
}

/// `ε + 1/2 − √(ε + 1/4)`: the smallest worst-case distance from the
/// max-norm sphere of radius `ε` to the parabolas `ξ2 = ±ξ1²`.
pub fn opposite_parabolas_minimum(epsilon: f64) -> f64 {
    epsilon + 0.5 - (epsilon + 0.25).sqrt()
}

/// Point at arc parameter `s ∈ [0, 8ε)` on the max-norm sphere of radius `ε`
/// around `center`, walked counterclockwise from `(ε, −ε)`.
fn square_point(center: &[f64], epsilon: f64, s: f64) -> [f64; 2] {
    let s = s.rem_euclid(8.0 * epsilon);
    let side = ((s / (2.0 * epsilon)) as usize).min(3);
    let t = s - 2.0 * epsilon * side as f64;
    let (u, v) = match side {
        0 => (epsilon, -epsilon + t),
        1 => (epsilon - t, epsilon),
        2 => (-epsilon, epsilon - t),
        _ => (-epsilon + t, -epsilon),
    };
    [center[0] + u, center[1] + v]
}

/// Brute-force `min_{‖x − x̄‖∞ = ε} max_i d(x, Ωᵢ)` on a planar scene: a
/// uniform grid of `grid` points followed by golden-section refinement
/// around the best cell.
pub fn sphere_min_max_distance(scene: &Scene, epsilon: f64, grid: usize) -> Result<f64> {
    if scene.dimension != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: scene.dimension,
        });
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) || grid < 4 {
        return Err(Error::InvalidParameter(
            "need epsilon > 0 and at least 4 grid points".into(),
        ));
    }
    let f = |s: f64| -> f64 {
        let x = square_point(&scene.basepoint, epsilon, s);
        scene
            .sets
            .iter()
            .map(|set| set.dist(&x, scene.norm).unwrap_or(f64::NAN))
            .fold(0.0, f64::max)
    };
    let h = 8.0 * epsilon / grid as f64;
    let (mut best_s, mut best) = (0.0, f(0.0));
    for k in 1..grid {
        let s = k as f64 * h;
        let v = f(s);
        if v < best {
            best = v;
            best_s = s;
        }
    }
    if best.is_nan() {
        return Err(Error::Domain("distance evaluation failed".into()));
    }
    let (_, refined) = golden_min(f, best_s - h, best_s + h);
    Ok(best.min(refined))
}

fn sphere_check(scene: &Scene, epsilon: f64) -> Result<SphereCheck> {
    let analytic = opposite_parabolas_minimum(epsilon);
    let brute_force = sphere_min_max_distance(scene, epsilon, SPHERE_GRID)?;
    let diff = (analytic - brute_force).abs();
    Ok(SphereCheck {
        epsilon,
        analytic,
        brute_force,
        diff,
        tolerance: SPHERE_CHECK_TOL,
        pass: diff <= SPHERE_CHECK_TOL,
    })
}

pub fn run_example(ex: &Example, seed: u64) -> Result<ExampleResult> {
    let record = Record::run(ex.task.clone().with_seed(seed))?;
    let sphere_checks = match &ex.task {
        Task::Sets { scene, .. } => ex
            .sphere_checks
            .iter()
            .map(|&e| sphere_check(scene, e))
            .collect::<Result<Vec<_>>>()?,
        Task::Mapping { .. } => Vec::new(),
    };
    let status = record.verdict.status;
    Ok(ExampleResult {
        name: ex.name.to_string(),
        description: ex.description.to_string(),
        source: ex.source,
        expected: ex.expected,
        status,
        matches: status == ex.expected,
        tolerance: record.verdict.tol,
        record,
        sphere_checks,
    })
}

pub fn run_corpus(examples: &[Example], seed: u64) -> Result<CorpusReport> {
    let results = examples
        .iter()
        .map(|e| run_example(e, seed))
        .collect::<Result<Vec<_>>>()?;
    let mismatches = results
        .iter()
        .filter(|r| !r.passed())
        .map(|r| r.name.clone())
        .collect();
    Ok(CorpusReport {
        tool: TOOL.into(),
        version: VERSION.into(),
        seed,
        examples: results,
        mismatches,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecheckRow {
    /// JSON pointer of the record inside the document.
    pub path: String,
    pub status: Status,
    /// `None` when the record carries no witness.
    pub confirmed: Option<bool>,
}

/// Find every object with both `task` and `verdict` members and recheck its
/// witness, in document order.
pub fn recheck_document(doc: &Value) -> Result<Vec<RecheckRow>> {
    let mut out = Vec::new();
    walk(doc, String::new(), &mut out)?;
    Ok(out)
}

fn walk(v: &Value, path: String, out: &mut Vec<RecheckRow>) -> Result<()> {
    match v {
        Value::Object(map) => {
            if let (Some(task), Some(verdict)) = (map.get("task"), map.get("verdict")) {
                let schema = |what: &str, e: serde_json::Error| Error::Schema {
                    path: format!("{path}/{what}"),
                    msg: e.to_string(),
                };
                let record = Record {
                    task: serde_json::from_value(task.clone()).map_err(|e| schema("task", e))?,
                    verdict: serde_json::from_value(verdict.clone())
                        .map_err(|e| schema("verdict", e))?,
                };
                out.push(RecheckRow {
                    path: if path.is_empty() {
                        "/".into()
                    } else {
                        path.clone()
                    },
                    status: record.verdict.status,
                    confirmed: record.recheck()?,
                });
            }
            for (k, child) in map {
                walk(
                    child,
                    format!("{path}/{}", k.replace('~', "~0").replace('/', "~1")),
                    out,
                )?;
            }
        }
        Value::Array(items) => {
            for (i, child) in items.iter().enumerate() {
                walk(child, format!("{path}/{i}"), out)?;
            }
        }
        _ => {}
    }
    Ok(())
}

/// `bin,count` rows of the margin histogram.
pub fn margin_csv(v: &Verdict) -> String {
    let mut s = String::from("bin,count\n");
    for (label, count) in margin_bins().iter().zip(&v.margin_histogram) {
        s.push_str(&format!("{label},{count}\n"));
    }
    s
}

/// `radius,sup` rows of a slope shell table.
pub fn shell_csv(rows: &[ShellRow]) -> String {
    let mut s = String::from("radius,sup\n");
    for r in rows {
        s.push_str(&format!("{},{}\n", r.radius, r.sup));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_walk_stays_on_sphere() {
        for k in 0..80 {
            let p = square_point(&[1.0, -2.0], 0.5, k as f64 * 0.05);
            let r = (p[0] - 1.0).abs().max((p[1] + 2.0).abs());
            assert!((r - 0.5).abs() < 1e-12, "{p:?}");
        }
    }

    #[test]
    fn names_are_unique() {
        let ex = bundled_examples();
        let mut names: Vec<_> = ex.iter().map(|e| e.name).collect();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), ex.len());
    }
}
