use transversal::certify::Status;
use transversal::corpus::{
    bundled_examples, example, margin_csv, opposite_parabolas_minimum, recheck_document,
    run_corpus, run_example, shell_csv, sphere_min_max_distance, Record, Source, Task,
};
use transversal::scenes;
use transversal::slopes::ShellRow;

/// Max-norm distance from `x` to the curve `ξ2 = c ξ1²`, by dense sampling of
/// the curve over `|ξ1| ≤ 2` followed by local refinement.
fn curve_dist(x: [f64; 2], c: f64) -> f64 {
    let d = |t: f64| (x[0] - t).abs().max((x[1] - c * t * t).abs());
    let n = 40_000;
    let (mut bt, mut bd) = (0.0, f64::INFINITY);
    for i in 0..=n {
        let t = -2.0 + 4.0 * i as f64 / n as f64;
        if d(t) < bd {
            bd = d(t);
            bt = t;
        }
    }
    let mut h = 4.0 / n as f64;
    for _ in 0..60 {
        for t in [bt - h, bt + h] {
            if d(t) < bd {
                bd = d(t);
                bt = t;
            }
        }
        h *= 0.7;
    }
    bd
}

/// Minimum of the worst-case distance to `ξ2 = ±ξ1²` over the right and top
/// sides of the max-norm sphere; by symmetry these cover the sphere.
fn sphere_oracle(eps: f64) -> f64 {
    let n = 400;
    let mut best = f64::INFINITY;
    for i in 0..=n {
        let s = -eps + 2.0 * eps * i as f64 / n as f64;
        for x in [[eps, s], [s, eps]] {
            best = best.min(curve_dist(x, 1.0).max(curve_dist(x, -1.0)));
        }
    }
    best
}

#[test]
fn sphere_formula_matches_independent_oracle() {
    for eps in [0.1, 0.25, 0.5] {
        let o = sphere_oracle(eps);
        assert!(
            (o - opposite_parabolas_minimum(eps)).abs() < 1e-6,
            "{eps}: {o}"
        );
    }
}

#[test]
fn library_sphere_search_matches_formula() {
    let s = scenes::opposite_parabolas();
    for eps in [0.1, 0.25, 0.5, 0.37] {
        let b = sphere_min_max_distance(&s, eps, 20_000).unwrap();
        assert!(
            (b - opposite_parabolas_minimum(eps)).abs() < 1e-6,
            "{eps}: {b}"
        );
    }
    assert!(sphere_min_max_distance(&s, 0.0, 100).is_err());
}

#[test]
fn corpus_inventory() {
    let ex = bundled_examples();
    assert!(ex.len() >= 8);
    let get = |n: &str| example(n).unwrap();
    assert_eq!(get("2.1(q=2)").expected, Status::HoldsOnSamples);
    assert_eq!(get("2.1(q=2)").source, Source::Paper);
    assert_eq!(get("tangent-parabolas-linear").expected, Status::Falsified);
    assert!(example("no-such-example").is_err());
}

#[test]
fn example_3_1_and_3_2() {
    let r = run_example(&example("3.1").unwrap(), 0).unwrap();
    assert_eq!(r.status, Status::HoldsOnSamples);
    assert!(r.matches);
    let r = run_example(&example("3.2").unwrap(), 0).unwrap();
    assert_eq!(r.status, Status::HoldsOnSamples);
    let c = r.sphere_checks.iter().find(|c| c.epsilon == 0.25).unwrap();
    assert!(c.pass && c.diff <= 1e-6, "{c:?}");
    assert!((c.analytic - (0.75 - 0.5f64.sqrt())).abs() < 1e-15);
}

/// Every mismatch in the corpus is the power-cusp claim with `t²`; the
/// gap is tracked in the acceptance suite.
#[test]
fn corpus_runs_and_falsifications_recheck() {
    let report = run_corpus(&bundled_examples(), 0).unwrap();
    assert_eq!(report.mismatches, vec!["2.1(q=2)".to_string()]);
    for r in &report.examples {
        if r.status == Status::Falsified {
            assert_eq!(r.record.recheck().unwrap(), Some(true), "{}", r.name);
        }
    }
    let doc = serde_json::to_value(&report).unwrap();
    let rows = recheck_document(&doc).unwrap();
    assert_eq!(rows.len(), report.examples.len());
    assert!(rows
        .iter()
        .all(|r| (r.status == Status::Falsified) == (r.confirmed == Some(true))));
}

#[test]
fn report_json_round_trips() {
    let report = run_corpus(
        &[
            example("singletons-semi").unwrap(),
            example("cubic-mapping-regular").unwrap(),
        ],
        3,
    )
    .unwrap();
    let text = serde_json::to_string_pretty(&report).unwrap();
    let back: transversal::corpus::CorpusReport = serde_json::from_str(&text).unwrap();
    assert_eq!(serde_json::to_string_pretty(&back).unwrap(), text);
}

#[test]
fn tampered_witness_fails_recheck() {
    let r = run_example(&example("tangent-parabolas-linear").unwrap(), 0).unwrap();
    let mut rec: Record = r.record.clone();
    let w = rec.verdict.witness.as_mut().unwrap();
    w.raw.point = Some(vec![0.0, 0.0]);
    assert_eq!(rec.recheck().unwrap(), Some(false));
}

#[test]
fn seed_is_applied_to_the_query() {
    let t = example("axes-sub-linear").unwrap().task.with_seed(42);
    assert_eq!(t.query().seed, 42);
    assert!(matches!(t, Task::Sets { .. }));
}

#[test]
fn corpus_is_thread_count_invariant() {
    let ex = bundled_examples();
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| serde_json::to_string_pretty(&run_corpus(&ex, 7).unwrap()).unwrap())
    };
    assert_eq!(run(1), run(8));
}

#[test]
fn csv_sidecars() {
    let r = run_example(&example("axes-sub-linear").unwrap(), 0).unwrap();
    let csv = margin_csv(&r.record.verdict);
    let lines: Vec<_> = csv.lines().collect();
    assert_eq!(lines[0], "bin,count");
    let total: usize = lines[1..]
        .iter()
        .map(|l| l.rsplit(',').next().unwrap().parse::<usize>().unwrap())
        .sum();
    assert_eq!(total, r.record.verdict.samples_evaluated);
    let rows = [
        ShellRow {
            radius: 1.0,
            sup: 2.0,
        },
        ShellRow {
            radius: 0.5,
            sup: 1.5,
        },
    ];
    assert_eq!(shell_csv(&rows), "radius,sup\n1,2\n0.5,1.5\n");
}
