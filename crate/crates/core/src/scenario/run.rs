use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::report::{summarize, Report, StepRecord, SummaryInputs};
use super::{ResolvedScenario, Scenario};
use crate::error::Result;
use crate::geometry::{fingerprint, Pose};
use crate::positioning::{build_lut, lut_lookup, Amcl, LookupTable, OdometryDelta, Prior};
use crate::radar::{cfar_detect, simulate_channel, synthesize_map};
use crate::tracking::TrackSet;

/// Mean AMCL error that counts as converged, in range bins.
const CONVERGENCE_BINS: f64 = 3.0;

pub fn run_scenario(scenario: &Scenario) -> Result<Report> {
    run_resolved(&scenario.resolve()?)
}

pub fn run_resolved(r: &ResolvedScenario) -> Result<Report> {
    let s = &r.scenario;
    let lut = if s.method.uses_lut() {
        Some(build_lut(&r.layout, &r.room, r.bin_width, s.lut.fine_step_m)?)
    } else {
        None
    };
    let per_run = (0..s.runs)
        .into_par_iter()
        .map(|run| run_once(r, lut.as_ref(), run))
        .collect::<Result<Vec<_>>>()?;
    let records: Vec<StepRecord> = per_run.into_iter().flatten().collect();
    let summary = summarize(
        &records,
        SummaryInputs {
            runs: s.runs,
            steps: r.samples.len(),
            threshold: CONVERGENCE_BINS * r.params.range_resolution,
            lut_entries: lut.as_ref().map(LookupTable::len),
            layout: &r.layout.lrps,
            radar_height: r.layout.radar_height,
            search: r.search.clone(),
        },
    );
    Ok(Report { records, summary })
}

fn run_once(r: &ResolvedScenario, lut: Option<&LookupTable>, run: usize) -> Result<Vec<StepRecord>> {
    let s = &r.scenario;
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed.wrapping_add(run as u64));
    let amcl_seed: u64 = rng.random();
    let mut tracks = TrackSet::new(&r.layout, r.tracking)?;
    let mut amcl = if s.method.uses_amcl() {
        Some(Amcl::new(s.amcl.clone(), r.layout.clone(), r.room, &Prior::Uniform, amcl_seed)?)
    } else {
        None
    };

    let mut out = Vec::with_capacity(r.samples.len());
    for (i, sample) in r.samples.iter().enumerate() {
        let step = i + 1;
        let paths = simulate_channel(&r.layout, &r.room, &sample.pose, sample.velocity, &r.params, &r.channel);
        let map = synthesize_map(&paths, &r.params, s.radar.noise_floor_w, &mut rng);
        let detections = cfar_detect(&map, &r.params, &r.cfar)?;
        let assoc = tracks.step(&detections, s.period_s)?;

        let mut observed = assoc.fingerprint;
        if let Some(f) = s.faults.iter().find(|f| f.step == step) {
            observed = fingerprint(&r.layout, &Pose::at(f.fingerprint_of));
        }

        let truth = sample.pose;
        let lut_est = lut.map(|t| lut_lookup(t, &observed)).transpose()?;
        let mut amcl_est = None;
        let mut n_particles = 0;
        let mut amcl_degraded = false;
        if let Some(filter) = amcl.as_mut() {
            if step == 1 {
                for _ in 0..s.warmup_steps {
                    filter.step(&observed, &OdometryDelta::default())?;
                }
            }
            let o = filter.step(&observed, &sample.odometry)?;
            amcl_est = Some(o.estimate);
            n_particles = o.n_particles;
            amcl_degraded = o.degraded;
        }
        out.push(StepRecord {
            run,
            step,
            truth,
            lut: lut_est,
            amcl: amcl_est,
            err_lut: lut_est.map(|p| p.distance(truth.position())),
            err_amcl: amcl_est.map(|p| p.position().distance(truth.position())),
            n_particles,
            degraded: assoc.degraded || amcl_degraded,
        });
    }
    Ok(out)
}
