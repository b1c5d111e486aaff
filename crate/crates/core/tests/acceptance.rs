//! Acceptance suite. Prints one line per criterion and exits non-zero if any
//! criterion fails.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{Binomial, DiscreteCDF};

use lrp_radar::ambiguity::{brute_force_scan, four_lrp_condition, mirror_ambiguities};
use lrp_radar::geometry::{fingerprint, Lrp, LrpLayout, Point2, Pose, Room};
use lrp_radar::positioning::{
    amcl_init, build_lut, lut_lookup, resample_systematic, weigh, Prior,
};
use lrp_radar::radar::{
    cfar_detect, simulate_channel, synthesize_map, to_db, CfarConfig, ChannelConfig, RadarParams,
};
use lrp_radar::scenario::{emit_report, run_scenario, Scenario, CONVERGED_FROM_STEP};
use lrp_radar::tracking::{kalman_update, Track, TrackingConfig};

const SCAN_GRID: f64 = 0.05;
const SCAN_TOL: f64 = 0.0375;
const LAYOUT_CASES: usize = 100;
const LAYOUT_BUDGET: Duration = Duration::from_secs(120);
const MIRROR_CASES: usize = 1000;
const MIRROR_TOL: f64 = 1e-9;
const PLACEMENTS: usize = 100;
const RCS_TOL_DB: f64 = 1.0;
const CFAR_MAPS: usize = 100;
const CFAR_PFA: f64 = 1e-4;
const BINOMIAL_ALPHA: f64 = 0.01;
const LUT_TARGET: f64 = 6574.0;
const LUT_REL_TOL: f64 = 0.10;
const AMCL_CONVERGED_MAX: f64 = 0.15;
const CONVERGENCE_STEP_MAX: usize = 8;
const SCENARIO_BUDGET: Duration = Duration::from_secs(300);
const FAULT_LUT_MIN: f64 = 1.0;
const FAULT_AMCL_MAX: f64 = 0.3;
const WEIGHT_SUM_TOL: f64 = 1e-9;
const SMOOTHING_RATIO_MAX: f64 = 0.8;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn scenario_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn room() -> Room {
    Room::new(5.0, 5.0, 4.0).unwrap()
}

fn random_point(rng: &mut ChaCha8Rng, room: &Room) -> Point2 {
    Point2::new(rng.random_range(0.0..room.width), rng.random_range(0.0..room.depth))
}

fn layout_of(points: &[Point2], types: &[u8]) -> LrpLayout {
    let lrps = points
        .iter()
        .zip(types)
        .map(|(p, &t)| Lrp::new(p.x, p.y, 3.0, t, 1.0))
        .collect();
    LrpLayout::new(lrps, 0.0).unwrap()
}

/// A one-type layout whose pair (0, 1) has its perpendicular bisector through
/// the midpoint of pair (2, 3).
fn violating_layout(rng: &mut ChaCha8Rng, room: &Room) -> LrpLayout {
    loop {
        let a = random_point(rng, room);
        let b = random_point(rng, room);
        let c = random_point(rng, room);
        if a.distance(b) < 0.5 {
            continue;
        }
        let mid = a.midpoint(b);
        let dir = (b - a).perp().normalized().unwrap();
        let m = mid + dir * rng.random_range(-3.0..3.0);
        let d = m * 2.0 - c;
        if !room.contains_planar(d) || d.distance(c) < 0.5 {
            continue;
        }
        let layout = layout_of(&[a, b, c, d], &[0; 4]);
        if !four_lrp_condition(&layout).unwrap() {
            return layout;
        }
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let room = room();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut one_type_missing = 0;
    for _ in 0..LAYOUT_CASES {
        let layout = violating_layout(&mut rng, &room);
        if brute_force_scan(&layout, &room, SCAN_GRID, SCAN_TOL).unwrap().is_empty() {
            one_type_missing += 1;
        }
    }
    let mut two_type_ambiguous = 0;
    let mut worst = 0;
    let mut widest: f64 = 0.0;
    let mut tested = 0;
    while tested < LAYOUT_CASES {
        let pts: Vec<Point2> = (0..4).map(|_| random_point(&mut rng, &room)).collect();
        let layout = layout_of(&pts, &[0, 0, 1, 1]);
        if !four_lrp_condition(&layout).unwrap() {
            continue;
        }
        tested += 1;
        let pairs = brute_force_scan(&layout, &room, SCAN_GRID, SCAN_TOL).unwrap();
        if !pairs.is_empty() {
            two_type_ambiguous += 1;
            worst = worst.max(pairs.len());
        }
        widest = pairs.iter().map(|p| p.separation()).fold(widest, f64::max);
    }
    let elapsed = start.elapsed();
    outcome(
        one_type_missing == 0 && two_type_ambiguous == 0 && elapsed < LAYOUT_BUDGET,
        format!(
            "violating one-type layouts without a pair: {one_type_missing}/{LAYOUT_CASES}; \
             two-type layouts with pairs: {two_type_ambiguous}/{LAYOUT_CASES} (up to {worst} pairs, \
             widest separation {widest:.2} m); {:.1} s",
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    while cases < MIRROR_CASES {
        let a = Point2::new(rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0));
        let b = Point2::new(rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0));
        let p = Point2::new(rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0));
        let Ok(images) = mirror_ambiguities(a, b, p) else { continue };
        cases += 1;
        let mut want = [p.distance(a), p.distance(b)];
        want.sort_by(f64::total_cmp);
        for q in images {
            let mut got = [q.distance(a), q.distance(b)];
            got.sort_by(f64::total_cmp);
            worst = worst.max((got[0] - want[0]).abs()).max((got[1] - want[1]).abs());
        }
    }
    outcome(worst <= MIRROR_TOL, format!("max distance mismatch {worst:.2e} m over {MIRROR_CASES} cases"))
}

fn criterion_3() -> Outcome {
    let params = RadarParams::proof_of_concept();
    let room = room();
    let direct = ChannelConfig {
        reflection_order: 0,
        ..ChannelConfig::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut range_err, mut vel_err, mut rcs_err): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let mut placements = 0;
    while placements < PLACEMENTS {
        let target = random_point(&mut rng, &room);
        let pose = Pose::new(rng.random_range(0.0..room.width), rng.random_range(0.0..room.depth), 0.0);
        let rcs = rng.random_range(0.1..5.0);
        let layout = LrpLayout::new(vec![Lrp::new(target.x, target.y, 3.0, 0, rcs)], 0.5).unwrap();
        let true_range = fingerprint(&layout, &pose).to_vector()[0];
        if true_range < 1.0 {
            continue;
        }
        placements += 1;
        let speed = rng.random_range(0.0..5.0);
        let heading = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
        let v = Point2::new(speed * heading.cos(), speed * heading.sin());
        let paths = simulate_channel(&layout, &room, &pose, v, &params, &direct);
        let map = synthesize_map(&paths, &params, 0.0, &mut rng);
        let dets = cfar_detect(&map, &params, &CfarConfig::default()).unwrap();
        let Some(det) = dets.iter().max_by(|a, b| a.power.total_cmp(&b.power)) else {
            return outcome(false, "a lone target was not detected");
        };
        range_err = range_err.max((det.range - true_range).abs());
        vel_err = vel_err.max((det.radial_velocity - paths[0].radial_velocity).abs());
        rcs_err = rcs_err.max((to_db(det.estimated_rcs) - to_db(rcs)).abs());
    }

    let mut noise_rng = ChaCha8Rng::seed_from_u64(33);
    let cfar = CfarConfig::from_pfa(8, 2, CFAR_PFA).unwrap();
    let mut alarms = 0u64;
    for _ in 0..CFAR_MAPS {
        let map = synthesize_map(&[], &params, 1.0, &mut noise_rng);
        alarms += cfar_detect(&map, &params, &cfar).unwrap().len() as u64;
    }
    let cells = (CFAR_MAPS * params.n_range_bins * params.n_doppler_bins) as u64;
    let binom = Binomial::new(CFAR_PFA, cells).unwrap();
    let lower = binom.cdf(alarms);
    let upper = if alarms == 0 { 1.0 } else { binom.sf(alarms - 1) };
    let p_value = (2.0 * lower.min(upper)).min(1.0);

    let dd = params.range_resolution;
    let dv = params.velocity_resolution;
    let pass = range_err <= dd / 2.0 + 1e-12
        && vel_err <= dv / 2.0 + 1e-12
        && rcs_err <= RCS_TOL_DB
        && p_value >= BINOMIAL_ALPHA;
    outcome(
        pass,
        format!(
            "range err {range_err:.4} m (<= {:.4}), velocity err {vel_err:.4} m/s (<= {:.4}), \
             rcs err {rcs_err:.3} dB; false alarms {alarms} of {cells} cells, p = {p_value:.3}",
            dd / 2.0,
            dv / 2.0
        ),
    )
}

fn criterion_4() -> Outcome {
    let scenario = Scenario::from_file(scenario_path("proof_of_concept.json")).unwrap();
    let r = scenario.resolve().unwrap();
    let table = build_lut(&r.layout, &r.room, r.bin_width, scenario.lut.fine_step_m).unwrap();
    let n = table.len() as f64;
    let mut misses = 0;
    for entry in table.entries.values() {
        let fp = fingerprint(&r.layout, &Pose::at(entry.position()));
        if lut_lookup(&table, &fp).unwrap() != entry.position() {
            misses += 1;
        }
    }
    let rel = (n - LUT_TARGET) / LUT_TARGET;
    outcome(
        rel.abs() <= LUT_REL_TOL && misses == 0,
        format!("{n} entries ({:+.1}% vs {LUT_TARGET}), {misses} failed self-lookups", rel * 100.0),
    )
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let scenario = Scenario::from_file(scenario_path("proof_of_concept.json")).unwrap();
    let report = run_scenario(&scenario).unwrap();
    let elapsed = start.elapsed();
    let s = &report.summary;
    let err = s.amcl_mean_error_converged.unwrap_or(f64::INFINITY);
    let conv = s.amcl_convergence_step;
    outcome(
        s.runs == 10
            && err <= AMCL_CONVERGED_MAX
            && conv.is_some_and(|k| k <= CONVERGENCE_STEP_MAX)
            && elapsed <= SCENARIO_BUDGET,
        format!(
            "{} runs, AMCL mean error over steps >= {CONVERGED_FROM_STEP}: {err:.4} m, converged at step {conv:?}, {:.1} s",
            s.runs,
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_6() -> Outcome {
    let scenario = Scenario::from_file(scenario_path("ambiguity_stress.json")).unwrap();
    let step = scenario.faults[0].step;
    let report = run_scenario(&scenario).unwrap();
    let at: Vec<_> = report.records.iter().filter(|r| r.step == step).collect();
    let lut_min = at.iter().filter_map(|r| r.err_lut).fold(f64::INFINITY, f64::min);
    let amcl_max = at.iter().filter_map(|r| r.err_amcl).fold(0.0, f64::max);
    let run0: Vec<_> = report.records.iter().filter(|r| r.run == 0).map(|r| r.lut).collect();
    let invariant = (1..scenario.runs).all(|run| {
        let other: Vec<_> = report.records.iter().filter(|r| r.run == run).map(|r| r.lut).collect();
        other == run0
    });
    outcome(
        at.len() == scenario.runs && lut_min > FAULT_LUT_MIN && amcl_max < FAULT_AMCL_MAX && invariant,
        format!(
            "fault at step {step}: min LUT error {lut_min:.3} m, max AMCL error {amcl_max:.3} m; \
             LUT run-invariant: {invariant}"
        ),
    )
}

fn criterion_7() -> Outcome {
    let room = room();
    let layout = layout_of(
        &[
            Point2::new(1.1, 0.8),
            Point2::new(3.9, 1.4),
            Point2::new(2.2, 4.1),
            Point2::new(4.3, 3.6),
        ],
        &[0; 4],
    );
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut weight_err: f64 = 0.0;
    let mut support_ok = true;
    for _ in 0..20 {
        let mut set = amcl_init(2000, &Prior::Uniform, &room, &mut rng).unwrap();
        let truth = Pose::at(random_point(&mut rng, &room));
        weigh(&mut set, &layout, &room, &fingerprint(&layout, &truth), 0.075);
        weight_err = weight_err.max((set.weight_sum() - 1.0).abs());
        let n = rng.random_range(100..3000);
        let resampled = resample_systematic(&set, n, &mut rng);
        support_ok &= resampled
            .particles
            .iter()
            .all(|p| set.particles.iter().any(|q| q.pose == p.pose && q.weight > 0.0));
    }

    let cfg = TrackingConfig::default();
    let mut contraction_ok = true;
    for _ in 0..1000 {
        let p = Track::new(rng.random_range(0.5..10.0), 0.0, rng.random_range(1e-6..10.0), 0, 1.0);
        let z = p.distance + rng.random_range(-1.0..1.0);
        let post = kalman_update(&p, z, cfg.r_var).unwrap();
        contraction_ok &= post.variance < p.variance && post.variance > 0.0;
    }

    let ratio = smoothing_ratio(&cfg);

    let scenario = Scenario::from_file(scenario_path("proof_of_concept.json")).unwrap();
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for d in &dirs {
        emit_report(&run_scenario(&scenario).unwrap(), d.path()).unwrap();
    }
    let read = |d: &tempfile::TempDir| std::fs::read(d.path().join("steps.csv")).unwrap();
    let identical = read(&dirs[0]) == read(&dirs[1]);

    outcome(
        weight_err <= WEIGHT_SUM_TOL && support_ok && contraction_ok && ratio <= SMOOTHING_RATIO_MAX && identical,
        format!(
            "weight sum err {weight_err:.1e}, resampling support {support_ok}, variance contraction {contraction_ok}, \
             smoothing RMSE ratio {ratio:.3}, identical reruns {identical}"
        ),
    )
}

/// Smoothed over raw range RMSE for a constant-velocity target measured with
/// noise of one range bin, over 100 seeds.
fn smoothing_ratio(cfg: &TrackingConfig) -> f64 {
    use rand_distr::{Distribution, Normal};
    let params = RadarParams::proof_of_concept();
    let dd = params.range_resolution;
    let dv = params.velocity_resolution;
    let (mut raw, mut smooth) = (0.0, 0.0);
    for seed in 0..100 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let noise = Normal::new(0.0, dd).unwrap();
        let v = rng.random_range(-1.0..1.0);
        let v_meas = (v / dv).round() * dv;
        let mut track: Option<Track> = None;
        for k in 0..50 {
            let truth = 15.0 + v * 0.25 * k as f64;
            let z = truth + noise.sample(&mut rng);
            let est = match track {
                None => Track::new(z, v_meas, cfg.r_var, 0, 1.0),
                Some(prev) => kalman_update(&prev.predicted(0.25, cfg).unwrap(), z, cfg.r_var).unwrap(),
            };
            raw += (z - truth).powi(2);
            smooth += (est.distance - truth).powi(2);
            track = Some(est);
        }
    }
    (smooth / raw).sqrt()
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("layout theory vs scan", criterion_1),
        ("mirror symmetry", criterion_2),
        ("radar chain", criterion_3),
        ("lookup table size", criterion_4),
        ("end-to-end localization", criterion_5),
        ("robustness to a corrupted fingerprint", criterion_6),
        ("filter properties", criterion_7),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!("criterion {} {}: {} ({})", i + 1, if o.pass { "PASS" } else { "FAIL" }, name, o.detail);
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
