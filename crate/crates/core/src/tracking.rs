//! Per-reflector range tracking.
//!
//! Every reflector gets a scalar Kalman filter on its slant distance with a
//! constant-velocity prediction driven by the measured Doppler velocity. Each
//! epoch the CFAR detections are assigned to tracks by a minimum-cost
//! matching that combines RCS agreement and distance to the prediction;
//! tracks without a plausible detection coast on their prediction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Fingerprint, LrpLayout, NUM_TYPES};
use crate::radar::{to_db, Detection, RadarParams};

/// Largest number of tracks the exact assignment accepts.
pub const MAX_TRACKS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrackingConfig {
    /// Detections farther than this from a prediction cannot be assigned.
    pub gate: f64,
    /// RCS mismatch, in dB, that costs one score unit.
    pub w_rcs_db: f64,
    /// Range mismatch, in m, that costs one score unit.
    pub w_dist: f64,
    /// White-acceleration spectral density, (m/s²)².
    pub process_noise: f64,
    /// Variance of the Doppler velocity used for prediction, (m/s)².
    pub velocity_var: f64,
    /// Range measurement variance, m².
    pub r_var: f64,
    /// Score of leaving a track unmatched for one epoch.
    pub miss_cost: f64,
}

impl TrackingConfig {
    /// Defaults scaled to the radar's range and velocity resolution.
    pub fn for_radar(params: &RadarParams) -> Self {
        let dd = params.range_resolution;
        Self {
            gate: 10.0 * dd,
            w_rcs_db: 3.0,
            w_dist: 3.0 * dd,
            process_noise: 0.25,
            velocity_var: params.velocity_resolution.powi(2) / 12.0,
            r_var: (0.5 * dd).powi(2),
            miss_cost: 3.0,
        }
    }

    /// Variance added to a track over `dt` seconds.
    pub fn process_variance(&self, dt: f64) -> f64 {
        self.process_noise * dt.powi(4) / 4.0 + self.velocity_var * dt * dt
    }
}

impl Default for TrackingConfig {
    fn default() -> Self {
        Self::for_radar(&RadarParams::proof_of_concept())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Track {
    pub distance: f64,
    pub radial_velocity: f64,
    pub variance: f64,
    pub age: u32,
    pub missed: u32,
    pub type_label: u8,
    /// Known RCS of the tracked reflector.
    pub rcs: f64,
}

impl Track {
    pub fn new(distance: f64, radial_velocity: f64, variance: f64, type_label: u8, rcs: f64) -> Self {
        Self {
            distance,
            radial_velocity,
            variance,
            age: 0,
            missed: 0,
            type_label,
            rcs,
        }
    }

    /// The track propagated `dt` seconds ahead.
    pub fn predicted(&self, dt: f64, cfg: &TrackingConfig) -> Result<Track> {
        Ok(Track {
            distance: predict(self, dt)?,
            variance: self.variance + cfg.process_variance(dt),
            age: self.age + 1,
            ..*self
        })
    }
}

/// Constant-velocity distance prediction.
pub fn predict(track: &Track, dt: f64) -> Result<f64> {
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!("prediction step must be > 0, got {dt}")));
    }
    Ok((track.distance + track.radial_velocity * dt).max(0.0))
}

/// Scalar Kalman update of a predicted track with a range measurement.
pub fn kalman_update(predicted: &Track, measured_distance: f64, r_var: f64) -> Result<Track> {
    if !(r_var > 0.0) {
        return Err(Error::InvalidArgument(format!("measurement variance must be > 0, got {r_var}")));
    }
    let p = predicted.variance;
    let (distance, variance) = if p.is_infinite() {
        (measured_distance, r_var)
    } else {
        let k = p / (p + r_var);
        (predicted.distance + k * (measured_distance - predicted.distance), (1.0 - k) * p)
    };
    Ok(Track {
        distance: distance.max(0.0),
        variance,
        missed: 0,
        ..*predicted
    })
}

fn rcs_score(det: &Detection, track: &Track, cfg: &TrackingConfig) -> Option<f64> {
    (det.estimated_rcs > 0.0).then(|| (to_db(det.estimated_rcs) - to_db(track.rcs)).abs() / cfg.w_rcs_db)
}

/// Association score of `det` against a predicted track, `None` outside the
/// gate or without a usable RCS estimate.
pub fn score(det: &Detection, predicted: &Track, cfg: &TrackingConfig) -> Option<f64> {
    let dr = (det.range - predicted.distance).abs();
    if dr > cfg.gate {
        return None;
    }
    Some(rcs_score(det, predicted, cfg)? + dr / cfg.w_dist)
}

/// Minimum-cost assignment of detections to tracks. `cost(d, t)` of `None`
/// forbids the pair; an unmatched track costs `miss_cost`. Returns the
/// chosen detection per track.
pub fn assign(
    n_tracks: usize,
    n_detections: usize,
    miss_cost: f64,
    cost: impl Fn(usize, usize) -> Option<f64>,
) -> Vec<Option<usize>> {
    assert!(n_tracks <= MAX_TRACKS, "at most {MAX_TRACKS} tracks");
    let states = 1usize << n_tracks;
    // dp[mask]: best cost with exactly the tracks in `mask` matched so far.
    let mut dp = vec![f64::INFINITY; states];
    let mut choice: Vec<Vec<Option<(usize, usize)>>> = Vec::with_capacity(n_detections);
    dp[0] = 0.0;
    for d in 0..n_detections {
        let costs: Vec<Option<f64>> = (0..n_tracks).map(|t| cost(d, t)).collect();
        let mut next = dp.clone();
        let mut came_from = vec![None; states];
        for mask in 0..states {
            if dp[mask].is_infinite() {
                continue;
            }
            for (t, c) in costs.iter().enumerate() {
                let Some(c) = c else { continue };
                if mask & (1 << t) != 0 {
                    continue;
                }
                let m2 = mask | (1 << t);
                if dp[mask] + c < next[m2] {
                    next[m2] = dp[mask] + c;
                    came_from[m2] = Some((mask, t));
                }
            }
        }
        dp = next;
        choice.push(came_from);
    }
    let mut best = 0;
    let mut best_cost = f64::INFINITY;
    for (mask, &c) in dp.iter().enumerate() {
        let missed = n_tracks - mask.count_ones() as usize;
        let total = if missed == 0 { c } else { c + miss_cost * missed as f64 };
        if total < best_cost {
            best_cost = total;
            best = mask;
        }
    }
    let mut out = vec![None; n_tracks];
    let mut mask = best;
    for d in (0..n_detections).rev() {
        if let Some((prev, t)) = choice[d][mask] {
            out[t] = Some(d);
            mask = prev;
        }
    }
    out
}

/// Result of one tracking epoch.
#[derive(Debug, Clone, PartialEq)]
pub struct Association {
    /// Fingerprint handed to positioning: smoothed track distances after
    /// [`TrackSet::step`], matched ranges after [`associate`].
    pub fingerprint: Fingerprint,
    /// Matched detection ranges, predictions for unmatched tracks.
    pub measured: Fingerprint,
    /// Index into the detection list for each track, `None` when unmatched.
    /// Each detection appears at most once.
    pub matches: Vec<Option<usize>>,
    /// For unmatched tracks: a detection already matched to another track
    /// that looks like both reflectors merged into one cell.
    pub shared: Vec<Option<usize>>,
    /// Some track had no detection this epoch.
    pub degraded: bool,
}

/// Consecutive misses after which a track may be restarted from any unused
/// detection with the right RCS, regardless of its prediction.
pub const REACQUIRE_AFTER: u32 = 2;

/// Associates `detections` with already-predicted tracks and returns the
/// fingerprint together with the match per track.
pub fn associate(detections: &[Detection], predicted: &[Track], cfg: &TrackingConfig) -> Association {
    let mut matches = assign(predicted.len(), detections.len(), cfg.miss_cost, |d, t| {
        score(&detections[d], &predicted[t], cfg)
    });

    // Lost tracks pick up leftover detections by RCS alone.
    let lost: Vec<usize> = (0..predicted.len())
        .filter(|&t| matches[t].is_none() && predicted[t].missed >= REACQUIRE_AFTER)
        .collect();
    if !lost.is_empty() {
        let used: Vec<usize> = matches.iter().flatten().copied().collect();
        let free: Vec<usize> = (0..detections.len()).filter(|d| !used.contains(d)).collect();
        let picks = assign(lost.len(), free.len(), 1.0, |d, t| {
            rcs_score(&detections[free[d]], &predicted[lost[t]], cfg).filter(|&c| c <= 1.0)
        });
        for (t, d) in lost.iter().zip(picks) {
            matches[*t] = d.map(|d| free[d]);
        }
    }

    let shared: Vec<Option<usize>> = (0..predicted.len())
        .map(|t| {
            if matches[t].is_some() {
                return None;
            }
            let mut best: Option<(f64, usize)> = None;
            for (u, m) in matches.iter().enumerate() {
                let Some(d) = *m else { continue };
                let det = &detections[d];
                let dr = (det.range - predicted[t].distance).abs();
                if dr > cfg.gate || det.estimated_rcs <= 0.0 {
                    continue;
                }
                let measured = to_db(det.estimated_rcs);
                let merged = (measured - to_db(predicted[t].rcs + predicted[u].rcs)).abs();
                let single = (measured - to_db(predicted[u].rcs)).abs();
                if merged < single && best.is_none_or(|(b, _)| dr < b) {
                    best = Some((dr, d));
                }
            }
            best.map(|(_, d)| d)
        })
        .collect();

    let fingerprint = fingerprint_of(predicted.iter().enumerate().map(|(t, p)| {
        match matches[t].or(shared[t]) {
            Some(d) => (p.type_label, detections[d].range),
            None => (p.type_label, p.distance),
        }
    }));
    let degraded = matches.iter().zip(&shared).any(|(m, s)| m.is_none() && s.is_none());
    Association {
        measured: fingerprint.clone(),
        fingerprint,
        matches,
        shared,
        degraded,
    }
}

fn fingerprint_of(entries: impl Iterator<Item = (u8, f64)>) -> Fingerprint {
    let mut by_type: [Vec<f64>; NUM_TYPES] = Default::default();
    for (t, d) in entries {
        by_type[t as usize].push(d);
    }
    Fingerprint::from_unsorted(by_type)
}

/// One track per reflector of a known layout.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackSet {
    cfg: TrackingConfig,
    reflectors: Vec<(u8, f64)>,
    tracks: Vec<Track>,
}

impl TrackSet {
    pub fn new(layout: &LrpLayout, cfg: TrackingConfig) -> Result<Self> {
        if layout.len() > MAX_TRACKS {
            return Err(Error::InvalidArgument(format!(
                "tracking supports at most {MAX_TRACKS} reflectors, layout has {}",
                layout.len()
            )));
        }
        Ok(Self {
            cfg,
            reflectors: layout.lrps.iter().map(|l| (l.type_label, l.rcs)).collect(),
            tracks: Vec::new(),
        })
    }

    pub fn config(&self) -> &TrackingConfig {
        &self.cfg
    }

    pub fn is_initialized(&self) -> bool {
        !self.tracks.is_empty()
    }

    pub fn tracks(&self) -> &[Track] {
        &self.tracks
    }

    /// Current per-type sorted track distances.
    pub fn fingerprint(&self) -> Fingerprint {
        fingerprint_of(self.tracks.iter().map(|t| (t.type_label, t.distance)))
    }

    /// Starts every track from the detection whose RCS best matches its
    /// reflector, using each detection once.
    pub fn bootstrap(&mut self, detections: &[Detection]) -> Result<Association> {
        let m = self.reflectors.len();
        let seeds: Vec<Track> = self.reflectors.iter().map(|&(t, rcs)| Track::new(0.0, 0.0, 0.0, t, rcs)).collect();
        let cfg = self.cfg;
        // Large enough that any full matching beats leaving a track empty.
        let matches = assign(m, detections.len(), 1e12, |d, t| rcs_score(&detections[d], &seeds[t], &cfg));
        let got = matches.iter().flatten().count();
        if got < m {
            return Err(Error::CardinalityMismatch { expected: m, got });
        }
        self.tracks = seeds
            .iter()
            .zip(&matches)
            .map(|(seed, d)| {
                let det = &detections[d.expect("all matched")];
                Track::new(det.range, det.radial_velocity, self.cfg.r_var, seed.type_label, seed.rcs)
            })
            .collect();
        Ok(Association {
            fingerprint: self.fingerprint(),
            measured: self.fingerprint(),
            shared: vec![None; m],
            matches,
            degraded: false,
        })
    }

    /// Predicts every track `dt` ahead, associates, and updates. The first
    /// call bootstraps instead.
    pub fn step(&mut self, detections: &[Detection], dt: f64) -> Result<Association> {
        if !self.is_initialized() {
            return self.bootstrap(detections);
        }
        let predicted = self
            .tracks
            .iter()
            .map(|t| t.predicted(dt, &self.cfg))
            .collect::<Result<Vec<_>>>()?;
        let assoc = associate(detections, &predicted, &self.cfg);
        self.tracks = predicted
            .iter()
            .enumerate()
            .map(|(i, p)| match assoc.matches[i].or(assoc.shared[i]) {
                Some(d) => {
                    let det = &detections[d];
                    let mut t = if p.missed >= REACQUIRE_AFTER && assoc.matches[i].is_some() {
                        Track::new(det.range, det.radial_velocity, self.cfg.r_var, p.type_label, p.rcs)
                    } else {
                        kalman_update(p, det.range, self.cfg.r_var)?
                    };
                    t.radial_velocity = det.radial_velocity;
                    t.age = p.age;
                    Ok(t)
                }
                None => Ok(Track { missed: p.missed + 1, ..*p }),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Association {
            fingerprint: self.fingerprint(),
            ..assoc
        })
    }
}
