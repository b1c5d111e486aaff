use std::path::Path;

use lrp_radar::geometry::Point2;
use lrp_radar::scenario::{emit_report, run_scenario, Method, Scenario};

fn load(name: &str) -> Scenario {
    Scenario::from_file(Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)).unwrap()
}

fn small(mut s: Scenario) -> Scenario {
    s.runs = 3;
    s.amcl.n0 = 3000;
    s
}

fn column(csv: &str, name: &str) -> Vec<Option<f64>> {
    let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
    let idx = header.iter().position(|h| *h == name).unwrap();
    csv.lines()
        .skip(1)
        .map(|l| {
            let cell = l.split(',').nth(idx).unwrap();
            (!cell.is_empty()).then(|| cell.parse().unwrap())
        })
        .collect()
}

#[test]
fn csv_matches_summary_and_recomputed_errors() {
    let report = run_scenario(&small(load("proof_of_concept.json"))).unwrap();
    let dir = tempfile::tempdir().unwrap();
    emit_report(&report, dir.path()).unwrap();
    let csv = std::fs::read_to_string(dir.path().join("steps.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 3 * 15);

    let get = |n: &str| column(&csv, n).into_iter().map(Option::unwrap).collect::<Vec<f64>>();
    let (tx, ty) = (get("true_x"), get("true_y"));
    for m in ["lut", "amcl"] {
        let (ex, ey, err) = (get(&format!("est_x_{m}")), get(&format!("est_y_{m}")), get(&format!("err_{m}")));
        for i in 0..err.len() {
            let d = Point2::new(tx[i], ty[i]).distance(Point2::new(ex[i], ey[i]));
            assert!((d - err[i]).abs() <= 1e-12, "{m} row {i}: {d} vs {}", err[i]);
        }
        let mean = err.iter().sum::<f64>() / err.len() as f64;
        let summary: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
        let reported = summary[format!("{m}_mean_error")].as_f64().unwrap();
        assert!((mean - reported).abs() <= 1e-12, "{m}: {mean} vs {reported}");
    }
}

#[test]
fn lut_is_run_invariant_and_amcl_varies() {
    let report = run_scenario(&small(load("proof_of_concept.json"))).unwrap();
    for st in &report.summary.per_step {
        assert_eq!(st.lut_std, Some(0.0));
    }
    assert!(report.summary.per_step.iter().any(|s| s.amcl_std.unwrap() > 0.0));
}

#[test]
fn reruns_are_byte_identical_and_seeds_matter() {
    let s = small(load("ambiguity_stress.json"));
    let bytes = |s: &Scenario| {
        let dir = tempfile::tempdir().unwrap();
        emit_report(&run_scenario(s).unwrap(), dir.path()).unwrap();
        std::fs::read(dir.path().join("steps.csv")).unwrap()
    };
    let a = bytes(&s);
    assert_eq!(a, bytes(&s));
    let mut other = s.clone();
    other.seed += 1;
    assert_ne!(a, bytes(&other));
}

#[test]
fn static_vehicle_tightens_the_cloud() {
    let mut s = small(load("proof_of_concept.json"));
    s.waypoints = vec![Point2::new(1.0, 1.0), Point2::new(1.0, 1.0)];
    s.dwell_steps = 9;
    s.method = Method::Amcl;
    let report = run_scenario(&s).unwrap();
    let per_step = &report.summary.per_step;
    assert_eq!(per_step.len(), 10);
    let means: Vec<f64> = per_step.iter().map(|s| s.amcl_mean.unwrap()).collect();
    assert!(means.last().unwrap() < &0.1, "{means:?}");
    assert!(report.records.iter().all(|r| r.lut.is_none()));
    // The adaptive population size follows the spread of the cloud.
    let counts: Vec<usize> = (1..=10)
        .map(|k| report.records.iter().filter(|r| r.step == k).map(|r| r.n_particles).sum())
        .collect();
    assert!(counts.windows(2).all(|w| w[1] <= w[0]), "{counts:?}");
    assert!(counts[9] < counts[0]);
}

#[test]
fn warmup_runs_before_scoring() {
    let mut s = small(load("proof_of_concept.json"));
    s.method = Method::Amcl;
    s.warmup_steps = 3;
    let report = run_scenario(&s).unwrap();
    let first = report.summary.per_step[0].amcl_mean.unwrap();
    assert!(first < 0.1, "{first}");
    // The cloud has already shrunk by the first scored step.
    assert!(report.records.iter().filter(|r| r.step == 1).all(|r| r.n_particles < s.amcl.n0));
}
