use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use transversal::certify::{estimate_modulus, ModulusOptions, Property, PropertyQuery, Status};
use transversal::corpus::{self, Record, Task};
use transversal::maps::{self, graph_sets, product_mapping, MappingSpec, TargetSet};
use transversal::slopes::{
    check_full_slope_condition, check_semi_slope_condition, check_sub_slope_condition, gamma_slope,
    Config, CoupledObjective, SlopeConditionQuery, SlopeMode, SlopeQuery,
};
use transversal::{Gauge, Point, Scene};

use crate::config::{
    CertifyArgs, Command, Direction, ExamplesArgs, ModulusArgs, QueryArgs, ReportArgs, RunConfig,
    SlopeArgs, SlopeModeArg, TranslateArgs,
};

/// Exit code for every error.
pub const EXIT_ERROR: i32 = 3;

#[derive(Debug)]
pub struct Outcome {
    pub report: Value,
    pub exit: i32,
    /// `(suffix, contents)`, written next to the report as `<stem>.<suffix>`.
    pub sidecars: Vec<(&'static str, String)>,
}

type Res<T> = std::result::Result<T, String>;

fn core<T>(r: transversal::Result<T>) -> Res<T> {
    r.map_err(|e| e.to_string())
}

fn in_file<T>(path: &Path, r: transversal::Result<T>) -> Res<T> {
    r.map_err(|e| format!("{}: {e}", path.display()))
}

fn read(path: &Path) -> Res<String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_scene(path: &Path) -> Res<Scene> {
    in_file(path, Scene::from_json(&read(path)?))
}

fn load_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Res<T> {
    serde_json::from_str(&read(path)?).map_err(|e| format!("{}: schema error: {e}", path.display()))
}

fn load_mapping(path: &Path) -> Res<(maps::MappingOracle, maps::GraphPoint)> {
    let spec = in_file(path, MappingSpec::from_json(&read(path)?))?;
    let dir = path
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));
    in_file(path, spec.resolve(&dir))
}

fn parse_gauge(text: &str) -> Res<Gauge> {
    text.parse::<Gauge>()
        .map_err(|e| format!("--gauge {text:?}: {e}"))
}

fn build_query(q: &QueryArgs, seed: u64) -> Res<PropertyQuery> {
    let gauge = parse_gauge(&q.gauge)?;
    let property: Property = q.property.into();
    let query = match property {
        Property::Semi if q.delta2.is_some() => {
            return Err("--delta2 does not apply to semi".into())
        }
        Property::Semi => PropertyQuery::semi(gauge, q.delta),
        p => PropertyQuery::new(p, gauge, q.delta, q.delta2.unwrap_or(q.delta)),
    }
    .with_budget(q.budget)
    .with_seed(seed);
    core(query.validate())?;
    Ok(query)
}

fn record_json(r: &Record) -> Value {
    serde_json::to_value(r).expect("records serialize")
}

pub fn run(cfg: &RunConfig) -> Res<Outcome> {
    let seed = cfg.seed;
    let mut out = match &cfg.command {
        Command::Certify(a) => certify(a, seed)?,
        Command::Modulus(a) => modulus(a, seed)?,
        Command::Slope(a) => slope(a, seed)?,
        Command::Translate(a) => translate(a, seed)?,
        Command::Examples(a) => examples(a, seed)?,
        Command::Report(a) => report(a)?,
    };
    out.report = json!({
        "tool": corpus::TOOL,
        "version": corpus::VERSION,
        "config": cfg.echo(),
        "result": out.report,
    });
    Ok(out)
}

fn certify(a: &CertifyArgs, seed: u64) -> Res<Outcome> {
    let scene = load_scene(&a.scene)?;
    let query = build_query(&a.query, seed)?;
    let record = core(Record::run(Task::Sets { scene, query }))?;
    Ok(Outcome {
        exit: record.verdict.status.exit_code(),
        sidecars: vec![("margins.csv", corpus::margin_csv(&record.verdict))],
        report: record_json(&record),
    })
}

fn modulus(a: &ModulusArgs, seed: u64) -> Res<Outcome> {
    let scene = load_scene(&a.scene)?;
    let opts = ModulusOptions {
        delta_max: a.delta_max,
        sweep: a.sweep,
        budget: a.budget,
        seed,
        rel_width: a.rel_width,
    };
    let est = core(estimate_modulus(&scene, a.property.into(), a.order, opts))?;
    Ok(Outcome {
        report: serde_json::to_value(&est).expect("estimate serializes"),
        exit: 0,
        sidecars: Vec::new(),
    })
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawAnchor {
    shifts: Vec<Point>,
    at: Config,
}

fn slope(a: &SlopeArgs, seed: u64) -> Res<Outcome> {
    let scene = load_scene(&a.scene)?;
    let gauge = parse_gauge(&a.gauge)?;
    if a.mode == SlopeModeArg::Raw {
        let path = a.anchor.as_ref().ok_or("raw mode needs --anchor")?;
        let anchor: RawAnchor = load_json(path)?;
        let obj = core(CoupledObjective::new(
            gauge,
            scene.sets.clone(),
            anchor.shifts,
            a.gamma,
            scene.norm,
        ))?;
        let mode = if a.nonlocal {
            SlopeMode::Nonlocal
        } else {
            SlopeMode::Local
        };
        let q = SlopeQuery {
            r0: a.r0,
            shells: a.shells,
            per_shell: a.per_shell,
            seed,
        };
        let est = core(gamma_slope(&obj, &anchor.at, mode, &q))?;
        return Ok(Outcome {
            sidecars: vec![("shells.csv", corpus::shell_csv(&est.shells))],
            report: serde_json::to_value(&est).expect("estimate serializes"),
            exit: 0,
        });
    }
    let q = match a.mode {
        SlopeModeArg::Semi if a.delta2.is_some() => {
            return Err("--delta2 does not apply to semi".into())
        }
        SlopeModeArg::Semi => SlopeConditionQuery::semi(gauge, a.delta, a.gamma),
        _ => SlopeConditionQuery::new(gauge, a.delta, a.delta2.unwrap_or(a.delta), a.gamma),
    }
    .with_budget(a.budget)
    .with_seed(seed);
    let check = core(match a.mode {
        SlopeModeArg::Semi => check_semi_slope_condition(&scene, &q),
        SlopeModeArg::Sub => check_sub_slope_condition(&scene, &q),
        _ => check_full_slope_condition(&scene, &q),
    })?;
    Ok(Outcome {
        exit: check.status.exit_code(),
        report: serde_json::to_value(&check).expect("check serializes"),
        sidecars: Vec::new(),
    })
}

fn translate(a: &TranslateArgs, seed: u64) -> Res<Outcome> {
    let q = build_query(&a.query, seed)?;
    let need = |p: &Option<PathBuf>, flag: &str| {
        p.clone()
            .ok_or(format!("--direction {:?} needs {flag}", a.direction))
    };
    let (transfer, records, status) = match a.direction {
        Direction::Sets2map => {
            let scene = load_scene(&need(&a.scene, "--scene")?)?;
            let t = core(maps::transfer_sets_to_mapping(&scene, &q))?;
            let (mapping, base) = core(product_mapping(&scene))?;
            let records = vec![
                Record {
                    task: Task::Sets {
                        scene,
                        query: t.set_query.clone(),
                    },
                    verdict: t.set_side.clone(),
                },
                Record {
                    task: Task::Mapping {
                        mapping,
                        base,
                        query: t.map_query.clone(),
                    },
                    verdict: t.map_side.clone(),
                },
            ];
            (serde_json::to_value(&t), records, t.set_side.status)
        }
        Direction::Map2sets => {
            let (mapping, base) = load_mapping(&need(&a.mapping, "--mapping")?)?;
            let t = core(maps::transfer_regularity_to_transversality(
                &mapping, &base, &q,
            ))?;
            let scene = core(graph_sets(&mapping, &base))?;
            let mut records = vec![Record {
                task: Task::Mapping {
                    mapping,
                    base,
                    query: t.premise_query.clone(),
                },
                verdict: t.premise.clone(),
            }];
            if let Some(c) = &t.conclusion {
                records.push(Record {
                    task: Task::Sets {
                        scene,
                        query: t.implied.clone(),
                    },
                    verdict: c.clone(),
                });
            }
            (serde_json::to_value(&t), records, t.premise.status)
        }
        Direction::Map2setTarget => {
            let (mapping, base) = load_mapping(&need(&a.mapping, "--mapping")?)?;
            let path = need(&a.target, "--target")?;
            let target: TargetSet = load_json(&path)?;
            let t = core(maps::mapping_to_set_transversality(
                &mapping,
                &target,
                &base,
                &q,
                a.cross_check,
            ))?;
            let records = vec![Record {
                task: Task::Sets {
                    scene: t.scene.clone(),
                    query: q.clone(),
                },
                verdict: t.verdict.clone(),
            }];
            (serde_json::to_value(&t), records, t.verdict.status)
        }
    };
    let margins = corpus::margin_csv(&records[0].verdict);
    Ok(Outcome {
        report: json!({
            "transfer": transfer.expect("transfer serializes"),
            "records": records.iter().map(record_json).collect::<Vec<_>>(),
        }),
        exit: status.exit_code(),
        sidecars: vec![("margins.csv", margins)],
    })
}

fn examples(a: &ExamplesArgs, seed: u64) -> Res<Outcome> {
    if a.list {
        let list: Vec<Value> = corpus::bundled_examples()
            .iter()
            .map(|e| json!({"name": e.name, "description": e.description, "source": e.source, "expected": e.expected}))
            .collect();
        return Ok(Outcome {
            report: Value::Array(list),
            exit: 0,
            sidecars: Vec::new(),
        });
    }
    if let Some(name) = &a.name {
        let ex = core(corpus::example(name))?;
        let r = core(corpus::run_example(&ex, seed))?;
        return Ok(Outcome {
            exit: r.status.exit_code(),
            sidecars: vec![("margins.csv", corpus::margin_csv(&r.record.verdict))],
            report: serde_json::to_value(&r).expect("result serializes"),
        });
    }
    let report = core(corpus::run_corpus(&corpus::bundled_examples(), seed))?;
    let mut csv = String::from("example,bin,count\n");
    for r in &report.examples {
        for line in corpus::margin_csv(&r.record.verdict).lines().skip(1) {
            csv.push_str(&format!("{},{line}\n", r.name));
        }
    }
    Ok(Outcome {
        exit: if report.mismatches.is_empty() { 0 } else { 1 },
        report: serde_json::to_value(&report).expect("report serializes"),
        sidecars: vec![("margins.csv", csv)],
    })
}

fn report(a: &ReportArgs) -> Res<Outcome> {
    let text = read(&a.recheck)?;
    let doc: Value =
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", a.recheck.display()))?;
    let rows = in_file(&a.recheck, corpus::recheck_document(&doc))?;
    if rows.is_empty() {
        return Err(format!(
            "{}: no certification records found",
            a.recheck.display()
        ));
    }
    let falsified = rows
        .iter()
        .filter(|r| r.status == Status::Falsified)
        .count();
    let failed = rows.iter().filter(|r| r.confirmed == Some(false)).count();
    Ok(Outcome {
        report: json!({
            "file": a.recheck,
            "records": rows.len(),
            "falsified": falsified,
            "failed": failed,
            "rows": rows,
        }),
        exit: if failed == 0 { 0 } else { 1 },
        sidecars: Vec::new(),
    })
}
