use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point2, Pose};
use crate::positioning::{turn_between, OdometryDelta};

/// One measurement epoch along a scripted path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathSample {
    /// Position with the heading pointing at the next sample.
    pub pose: Pose,
    /// Instantaneous velocity used for Doppler.
    pub velocity: Point2,
    /// Exact movement from this sample to the next; zero for the last one.
    pub odometry: OdometryDelta,
}

/// Samples a constant-speed piecewise-linear path every `period` seconds.
/// `dwell_steps` extra samples repeat the final position at rest.
pub fn interpolate_path(waypoints: &[Point2], speed: f64, period: f64, dwell_steps: usize) -> Result<Vec<PathSample>> {
    if waypoints.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "a path needs at least 2 waypoints, got {}",
            waypoints.len()
        )));
    }
    if !(speed > 0.0 && speed.is_finite()) || !(period > 0.0 && period.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "speed and period must be > 0, got {speed} m/s and {period} s"
        )));
    }
    let mut cum = vec![0.0];
    for w in waypoints.windows(2) {
        cum.push(cum.last().unwrap() + w[0].distance(w[1]));
    }
    let total = *cum.last().unwrap();
    let ds = speed * period;
    let n = (total / ds + 1e-9).floor() as usize + 1;

    // Position and direction of travel at arc length s.
    let locate = |s: f64| -> (Point2, Option<Point2>) {
        let mut seg = 0;
        while seg + 2 < cum.len() && s >= cum[seg + 1] - 1e-12 {
            seg += 1;
        }
        let (a, b) = (waypoints[seg], waypoints[seg + 1]);
        let len = cum[seg + 1] - cum[seg];
        let t = if len > 0.0 { ((s - cum[seg]) / len).clamp(0.0, 1.0) } else { 0.0 };
        (a + (b - a) * t, (b - a).normalized())
    };

    let points: Vec<(Point2, Option<Point2>)> = (0..n).map(|k| locate(k as f64 * ds)).collect();
    let mut headings = Vec::with_capacity(n + dwell_steps);
    for k in 0..n {
        let chord = if k + 1 < n { (points[k + 1].0 - points[k].0).normalized() } else { None };
        let h = chord
            .or(points[k].1)
            .map(|d| d.y.atan2(d.x))
            .or_else(|| headings.last().copied())
            .unwrap_or(0.0);
        headings.push(h);
    }
    let mut out: Vec<PathSample> = (0..n)
        .map(|k| {
            let (p, dir) = points[k];
            let odometry = if k + 1 < n {
                OdometryDelta {
                    turned_angle: turn_between(headings[k], headings[k + 1]),
                    traveled_distance: p.distance(points[k + 1].0),
                }
            } else {
                OdometryDelta::default()
            };
            PathSample {
                pose: Pose::new(p.x, p.y, headings[k]),
                velocity: if total > 0.0 { dir.unwrap_or_default() * speed } else { Point2::default() },
                odometry,
            }
        })
        .collect();
    let last = *out.last().unwrap();
    for _ in 0..dwell_steps {
        out.push(PathSample {
            velocity: Point2::default(),
            odometry: OdometryDelta::default(),
            ..last
        });
    }
    if dwell_steps > 0 {
        // The vehicle stops after the last travelled sample.
        let i = n - 1;
        out[i].velocity = Point2::default();
    }
    Ok(out)
}
