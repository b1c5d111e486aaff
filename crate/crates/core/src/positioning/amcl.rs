use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{fingerprint, wrap_angle, Fingerprint, LrpLayout, Point2, Pose, Room};

/// How the pose estimate is formed from the weighted particles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    /// Weighted mean of the `top_k` heaviest particles within `top_radius`
    /// of the heaviest one.
    TopK,
    /// Weighted mean of all particles.
    WeightedMean,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AmclConfig {
    pub n0: usize,
    pub n_min: usize,
    pub sigma_theta_deg: f64,
    pub sigma_d_m: f64,
    pub likelihood_sigma_m: f64,
    pub top_k: usize,
    pub top_radius_m: f64,
    /// Resize the population from its spread; otherwise stay at `n0`.
    pub adapt: bool,
    pub adapt_beta: f64,
    /// Length scale of the adaptation rule, normally the range resolution.
    pub adapt_resolution_m: f64,
    pub estimator: Estimator,
    /// Observations whose best particle misses by more than this many
    /// `likelihood_sigma_m` RMS per distance are ignored for one step.
    /// `null` keeps every observation that does not underflow.
    pub outlier_gate: Option<f64>,
}

impl Default for AmclConfig {
    fn default() -> Self {
        Self {
            n0: 10_000,
            n_min: 500,
            sigma_theta_deg: 5.0,
            sigma_d_m: 0.05,
            likelihood_sigma_m: 0.075,
            top_k: 20,
            top_radius_m: 0.15,
            adapt: true,
            adapt_beta: 50.0,
            adapt_resolution_m: 0.075,
            estimator: Estimator::TopK,
            outlier_gate: Some(3.0),
        }
    }
}

impl AmclConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n0 == 0 || self.n_min == 0 || self.n_min > self.n0 {
            return Err(Error::InvalidArgument(format!(
                "need 0 < n_min <= n0, got n_min {} and n0 {}",
                self.n_min, self.n0
            )));
        }
        if let Some(g) = self.outlier_gate {
            if !(g > 0.0) {
                return Err(Error::InvalidArgument(format!("outlier_gate must be > 0, got {g}")));
            }
        }
        if self.top_k == 0 {
            return Err(Error::InvalidArgument("top_k must be at least 1".into()));
        }
        for (name, v) in [
            ("sigma_theta_deg", self.sigma_theta_deg),
            ("sigma_d_m", self.sigma_d_m),
            ("top_radius_m", self.top_radius_m),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!("{name} must be >= 0, got {v}")));
            }
        }
        for (name, v) in [
            ("likelihood_sigma_m", self.likelihood_sigma_m),
            ("adapt_beta", self.adapt_beta),
            ("adapt_resolution_m", self.adapt_resolution_m),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!("{name} must be > 0, got {v}")));
            }
        }
        Ok(())
    }
}

/// Initial particle distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Prior {
    /// Uniform over the room floor and all headings.
    Uniform,
    Point { pose: Pose },
    Gaussian { mean: Pose, sigma_xy: f64, sigma_theta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Particle {
    pub pose: Pose,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticleSet {
    pub particles: Vec<Particle>,
    pub iteration: u64,
}

impl ParticleSet {
    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    pub fn weight_sum(&self) -> f64 {
        self.particles.iter().map(|p| p.weight).sum()
    }

    /// Unweighted mean position.
    pub fn mean_position(&self) -> Point2 {
        let n = self.len() as f64;
        let (sx, sy) = self.particles.iter().fold((0.0, 0.0), |(sx, sy), p| (sx + p.pose.x, sy + p.pose.y));
        Point2::new(sx / n, sy / n)
    }

    /// Trace of the unweighted positional covariance.
    pub fn position_variance_trace(&self) -> f64 {
        let m = self.mean_position();
        let n = self.len() as f64;
        self.particles
            .iter()
            .map(|p| (p.pose.x - m.x).powi(2) + (p.pose.y - m.y).powi(2))
            .sum::<f64>()
            / n
    }
}

/// Movement between two consecutive measurements: drive `traveled_distance`
/// along the current heading, then turn by `turned_angle`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct OdometryDelta {
    pub turned_angle: f64,
    pub traveled_distance: f64,
}

impl OdometryDelta {
    pub fn apply(&self, pose: &Pose) -> Pose {
        Pose::new(
            pose.x + self.traveled_distance * pose.theta.cos(),
            pose.y + self.traveled_distance * pose.theta.sin(),
            pose.theta + self.turned_angle,
        )
    }
}

pub fn amcl_init<R: Rng + ?Sized>(n0: usize, prior: &Prior, room: &Room, rng: &mut R) -> Result<ParticleSet> {
    if n0 == 0 {
        return Err(Error::InvalidArgument("need at least one particle".into()));
    }
    let w = 1.0 / n0 as f64;
    let particles = match *prior {
        Prior::Uniform => (0..n0)
            .map(|_| {
                let x = rng.random_range(0.0..room.width);
                let y = rng.random_range(0.0..room.depth);
                let theta = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
                Pose::new(x, y, theta)
            })
            .collect::<Vec<_>>(),
        Prior::Point { pose } => vec![pose; n0],
        Prior::Gaussian { mean, sigma_xy, sigma_theta } => {
            let nxy = Normal::new(0.0, sigma_xy).map_err(|e| Error::InvalidArgument(e.to_string()))?;
            let nt = Normal::new(0.0, sigma_theta).map_err(|e| Error::InvalidArgument(e.to_string()))?;
            (0..n0)
                .map(|_| {
                    Pose::new(
                        mean.x + nxy.sample(rng),
                        mean.y + nxy.sample(rng),
                        mean.theta + nt.sample(rng),
                    )
                })
                .collect()
        }
    };
    Ok(ParticleSet {
        particles: particles.into_iter().map(|pose| Particle { pose, weight: w }).collect(),
        iteration: 0,
    })
}

/// Gaussian log-likelihood of `observed` at `pose`, comparing sorted
/// per-type distances elementwise. Up to a constant.
pub fn log_likelihood(layout: &LrpLayout, pose: &Pose, observed: &Fingerprint, sigma: f64) -> f64 {
    let expected = fingerprint(layout, pose);
    let ss: f64 = expected.iter().zip(observed.iter()).map(|(a, b)| (a - b).powi(2)).sum();
    -0.5 * ss / (sigma * sigma)
}

/// Replaces the weights with normalized likelihoods. Particles off the room
/// floor get weight 0. Returns `false` when every weight would underflow, in
/// which case weights become uniform.
pub fn weigh(set: &mut ParticleSet, layout: &LrpLayout, room: &Room, observed: &Fingerprint, sigma: f64) -> bool {
    weigh_gated(set, layout, room, observed, sigma, f64::MIN_POSITIVE.ln())
}

/// Like [`weigh`], but also rejects the observation when the best
/// log-likelihood is below `min_log`.
pub fn weigh_gated(
    set: &mut ParticleSet,
    layout: &LrpLayout,
    room: &Room,
    observed: &Fingerprint,
    sigma: f64,
    min_log: f64,
) -> bool {
    let logs: Vec<f64> = set
        .particles
        .par_iter()
        .map(|p| {
            if room.contains_planar(p.pose.position()) {
                log_likelihood(layout, &p.pose, observed, sigma)
            } else {
                f64::NEG_INFINITY
            }
        })
        .collect();
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let n = set.len() as f64;
    if !(max >= min_log.max(f64::MIN_POSITIVE.ln())) {
        for p in &mut set.particles {
            p.weight = 1.0 / n;
        }
        return false;
    }
    let mut total = 0.0;
    for (p, l) in set.particles.iter_mut().zip(&logs) {
        p.weight = (l - max).exp();
        total += p.weight;
    }
    for p in &mut set.particles {
        p.weight /= total;
    }
    true
}

/// Weighted mean pose with the heading averaged on the unit circle. All-zero
/// weights count equally. Offsets are taken from the first particle so that
/// identical particles reproduce their pose exactly.
fn weighted_pose(particles: &[Particle]) -> Pose {
    let total: f64 = particles.iter().map(|p| p.weight).sum();
    let weight = |p: &Particle| if total > 0.0 { p.weight } else { 1.0 };
    let origin = particles[0].pose;
    let (mut w, mut x, mut y, mut c, mut s) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for p in particles {
        let pw = weight(p);
        w += pw;
        x += pw * (p.pose.x - origin.x);
        y += pw * (p.pose.y - origin.y);
        c += pw * p.pose.theta.cos();
        s += pw * p.pose.theta.sin();
    }
    Pose::new(origin.x + x / w, origin.y + y / w, s.atan2(c))
}

/// Pose estimate from a normalized particle set.
pub fn estimate(set: &ParticleSet, cfg: &AmclConfig) -> Pose {
    match cfg.estimator {
        Estimator::WeightedMean => weighted_pose(&set.particles),
        Estimator::TopK => {
            let mut best = 0;
            for (i, p) in set.particles.iter().enumerate() {
                if p.weight > set.particles[best].weight {
                    best = i;
                }
            }
            let centre = set.particles[best].pose.position();
            let mut near: Vec<usize> = (0..set.len())
                .filter(|&i| set.particles[i].pose.position().distance(centre) <= cfg.top_radius_m)
                .collect();
            near.sort_by(|&a, &b| set.particles[b].weight.total_cmp(&set.particles[a].weight).then(a.cmp(&b)));
            near.truncate(cfg.top_k);
            let chosen: Vec<Particle> = near.iter().map(|&i| set.particles[i]).collect();
            weighted_pose(&chosen)
        }
    }
}

/// Systematic (low-variance) resampling to `n` particles with equal weights.
pub fn resample_systematic<R: Rng + ?Sized>(set: &ParticleSet, n: usize, rng: &mut R) -> ParticleSet {
    let step = 1.0 / n as f64;
    let total = set.weight_sum();
    let u0: f64 = rng.random_range(0.0..step);
    let mut out = Vec::with_capacity(n);
    let mut i = 0;
    let mut cum = set.particles[0].weight / total;
    for j in 0..n {
        let u = u0 + j as f64 * step;
        while u > cum && i + 1 < set.len() {
            i += 1;
            cum += set.particles[i].weight / total;
        }
        out.push(Particle {
            pose: set.particles[i].pose,
            weight: step,
        });
    }
    ParticleSet {
        particles: out,
        iteration: set.iteration,
    }
}

/// Moves every particle by `odo` with independent Gaussian errors on the
/// traveled distance and on the heading.
pub fn propagate<R: Rng + ?Sized>(set: &mut ParticleSet, odo: &OdometryDelta, cfg: &AmclConfig, rng: &mut R) {
    let sd = cfg.sigma_d_m;
    let st = cfg.sigma_theta_deg.to_radians();
    for p in &mut set.particles {
        let nd = if sd > 0.0 { sd * rng.sample::<f64, _>(rand_distr::StandardNormal) } else { 0.0 };
        let nt = if st > 0.0 { st * rng.sample::<f64, _>(rand_distr::StandardNormal) } else { 0.0 };
        let noisy = OdometryDelta {
            turned_angle: odo.turned_angle + nt,
            traveled_distance: odo.traveled_distance + nd,
        };
        p.pose = noisy.apply(&p.pose);
    }
}

/// Population size for the next iteration.
pub fn adapt_particle_count(set: &ParticleSet, cfg: &AmclConfig) -> usize {
    if !cfg.adapt {
        return cfg.n0;
    }
    let raw = cfg.adapt_beta * set.position_variance_trace() / cfg.adapt_resolution_m.powi(2);
    if !raw.is_finite() {
        return cfg.n0;
    }
    (raw.ceil() as usize).clamp(cfg.n_min, cfg.n0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmclOutput {
    pub estimate: Pose,
    /// Particles that carried this step's weights.
    pub n_particles: usize,
    /// The observation was inconsistent with every particle.
    pub degraded: bool,
}

/// Seeded adaptive Monte Carlo localization over a known reflector layout.
#[derive(Debug, Clone)]
pub struct Amcl {
    cfg: AmclConfig,
    layout: LrpLayout,
    room: Room,
    set: ParticleSet,
    next_n: usize,
    rng: ChaCha8Rng,
}

impl Amcl {
    pub fn new(cfg: AmclConfig, layout: LrpLayout, room: Room, prior: &Prior, seed: u64) -> Result<Self> {
        cfg.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let set = amcl_init(cfg.n0, prior, &room, &mut rng)?;
        Ok(Self {
            next_n: cfg.n0,
            cfg,
            layout,
            room,
            set,
            rng,
        })
    }

    pub fn particles(&self) -> &ParticleSet {
        &self.set
    }

    pub fn config(&self) -> &AmclConfig {
        &self.cfg
    }

    /// One filter iteration: weigh by `observed`, estimate, resample, then
    /// move by `odo` to the next measurement epoch and resize.
    pub fn step(&mut self, observed: &Fingerprint, odo: &OdometryDelta) -> Result<AmclOutput> {
        if observed.type_counts() != self.layout.type_counts() {
            return Err(Error::CardinalityMismatch {
                expected: self.layout.len(),
                got: observed.len(),
            });
        }
        let n_particles = self.set.len();
        let min_log = match self.cfg.outlier_gate {
            Some(g) => -0.5 * observed.len() as f64 * g * g,
            None => f64::NEG_INFINITY,
        };
        let ok = weigh_gated(&mut self.set, &self.layout, &self.room, observed, self.cfg.likelihood_sigma_m, min_log);
        // Uniform weights carry no ranking, so fall back to the cloud mean.
        let estimate = if ok {
            estimate(&self.set, &self.cfg)
        } else {
            weighted_pose(&self.set.particles)
        };
        let mut next = resample_systematic(&self.set, self.next_n, &mut self.rng);
        propagate(&mut next, odo, &self.cfg, &mut self.rng);
        next.iteration = self.set.iteration + 1;
        self.next_n = adapt_particle_count(&next, &self.cfg);
        self.set = next;
        Ok(AmclOutput {
            estimate,
            n_particles,
            degraded: !ok,
        })
    }
}

/// Heading change between two directions, in `[-π, π)`.
pub fn turn_between(from: f64, to: f64) -> f64 {
    wrap_angle(to - from)
}
