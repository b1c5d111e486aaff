//! Geometric propagation paths for a monostatic radar in a box room.
//!
//! Direct reflector returns follow the radar equation. Surface bounces are
//! enumerated with the image method (up to second order); each bounce acts
//! as a point scatterer with a fixed effective RCS at its specular point, so
//! multi-bounce powers follow the cascaded path-loss form.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::RadarParams;
use crate::geometry::{LrpLayout, Point2, Pose, Room};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelConfig {
    /// Effective RCS assigned to every specular surface bounce.
    pub wall_rcs: f64,
    /// 0: reflector returns only; 1: plus single surface bounces;
    /// 2: plus double surface bounces.
    pub reflection_order: u8,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        Self {
            wall_rcs: 0.1,
            reflection_order: 2,
        }
    }
}

/// One radar echo path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropagationPath {
    /// Round-trip length.
    pub total_length: f64,
    /// Rate of change of the one-way length; positive when receding.
    pub radial_velocity: f64,
    pub received_power: f64,
    pub n_reflections: u32,
    /// Ground truth only: the path is a direct reflector return.
    pub is_lrp_path: bool,
}

impl PropagationPath {
    pub fn one_way_length(&self) -> f64 {
        0.5 * self.total_length
    }

    pub fn delay(&self) -> f64 {
        self.total_length / super::SPEED_OF_LIGHT
    }
}

/// Radar equation for a single reflection at range `r`.
pub fn radar_equation_power(params: &RadarParams, rcs: f64, r: f64) -> f64 {
    let lambda = params.wavelength();
    params.tx_power * params.tx_gain * params.rx_gain * lambda * lambda * rcs / ((4.0 * PI).powi(3) * r.powi(4))
}

/// Received power of a path with `rcs.len()` reflections and
/// `segments = [d0, .., dN]` between transmitter, scatterers and receiver.
pub fn multipath_power(params: &RadarParams, segments: &[f64], rcs: &[f64]) -> f64 {
    assert_eq!(segments.len(), rcs.len() + 1, "N reflections need N + 1 segments");
    let lambda = params.wavelength();
    let mut p = params.tx_power * params.tx_gain * params.rx_gain * lambda * lambda
        / ((4.0 * PI).powi(2) * segments[0] * segments[0]);
    for (&sigma, &d) in rcs.iter().zip(&segments[1..]) {
        p *= sigma / (4.0 * PI * d * d);
    }
    p
}

type Vec3 = [f64; 3];

fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

/// An axis-aligned wall, floor or ceiling: `p[axis] == coord`.
#[derive(Debug, Clone, Copy)]
struct Surface {
    axis: usize,
    coord: f64,
}

impl Surface {
    fn reflect(&self, p: Vec3) -> Vec3 {
        let mut out = p;
        out[self.axis] = 2.0 * self.coord - p[self.axis];
        out
    }

    /// Velocity of the image of a point moving with `v`.
    fn reflect_velocity(&self, v: Vec3) -> Vec3 {
        let mut out = v;
        out[self.axis] = -v[self.axis];
        out
    }

    fn distance(&self, p: Vec3) -> f64 {
        (p[self.axis] - self.coord).abs()
    }

    /// This surface mirrored across `other`.
    fn mirrored_by(&self, other: &Surface) -> Surface {
        if self.axis == other.axis {
            Surface {
                axis: self.axis,
                coord: 2.0 * other.coord - self.coord,
            }
        } else {
            *self
        }
    }

    /// Fraction along `from -> to` where the segment crosses the plane.
    fn crossing(&self, from: Vec3, to: Vec3) -> Option<f64> {
        let den = to[self.axis] - from[self.axis];
        if den.abs() < 1e-12 {
            return None;
        }
        let t = (self.coord - from[self.axis]) / den;
        (0.0..=1.0).contains(&t).then_some(t)
    }
}

fn room_surfaces(room: &Room) -> [Surface; 6] {
    [
        Surface { axis: 0, coord: 0.0 },
        Surface { axis: 0, coord: room.width },
        Surface { axis: 1, coord: 0.0 },
        Surface { axis: 1, coord: room.depth },
        Surface { axis: 2, coord: 0.0 },
        Surface { axis: 2, coord: room.height },
    ]
}

/// Enumerates the echo paths seen by the radar at `pose` moving with planar
/// velocity `velocity`.
///
/// Surfaces the radar touches (e.g. the floor for a floor-level radar) are
/// skipped because their specular return has zero range.
pub fn simulate_channel(
    layout: &LrpLayout,
    room: &Room,
    pose: &Pose,
    velocity: Point2,
    params: &RadarParams,
    cfg: &ChannelConfig,
) -> Vec<PropagationPath> {
    let radar: Vec3 = [pose.x, pose.y, layout.radar_height];
    let v: Vec3 = [velocity.x, velocity.y, 0.0];
    let mut paths = Vec::new();

    for lrp in &layout.lrps {
        let l = [lrp.x, lrp.y, lrp.z];
        let r = norm(sub(radar, l));
        if r <= 0.0 {
            continue;
        }
        paths.push(PropagationPath {
            total_length: 2.0 * r,
            radial_velocity: dot(sub(radar, l), v) / r,
            received_power: radar_equation_power(params, lrp.rcs, r),
            n_reflections: 1,
            is_lrp_path: true,
        });
    }
    if cfg.reflection_order == 0 {
        return paths;
    }

    let surfaces: Vec<Surface> = room_surfaces(room)
        .into_iter()
        .filter(|s| s.distance(radar) > 1e-9)
        .collect();
    let sigma_w = cfg.wall_rcs;

    // Straight back from a surface.
    for s in &surfaces {
        let h = s.distance(radar);
        let sign = (radar[s.axis] - s.coord).signum();
        paths.push(PropagationPath {
            total_length: 2.0 * h,
            radial_velocity: sign * v[s.axis],
            received_power: multipath_power(params, &[h, h], &[sigma_w]),
            n_reflections: 1,
            is_lrp_path: false,
        });
    }

    // radar -> surface -> reflector -> radar, and the reverse direction.
    for lrp in &layout.lrps {
        let l = [lrp.x, lrp.y, lrp.z];
        let direct = norm(sub(radar, l));
        let direct_rate = dot(sub(radar, l), v) / direct;
        for s in &surfaces {
            if s.distance(l) < 1e-9 {
                continue;
            }
            let image = s.reflect(radar);
            let Some(t) = s.crossing(image, l) else { continue };
            let bounce_leg = norm(sub(image, l));
            let bounce_rate = dot(sub(image, l), s.reflect_velocity(v)) / bounce_leg;
            let (d0, d1) = (t * bounce_leg, (1.0 - t) * bounce_leg);
            let power = multipath_power(params, &[d0, d1, direct], &[sigma_w, lrp.rcs]);
            let path = PropagationPath {
                total_length: bounce_leg + direct,
                radial_velocity: 0.5 * (bounce_rate + direct_rate),
                received_power: power,
                n_reflections: 2,
                is_lrp_path: false,
            };
            paths.push(path);
            paths.push(path);
        }
    }
    if cfg.reflection_order < 2 {
        return paths;
    }

    // radar -> s1 -> s2 -> radar.
    for (i, s1) in surfaces.iter().enumerate() {
        for (j, s2) in surfaces.iter().enumerate() {
            if i == j {
                continue;
            }
            let image = s1.reflect(s2.reflect(radar));
            let image_v = s1.reflect_velocity(s2.reflect_velocity(v));
            let total = norm(sub(radar, image));
            let s2_unfolded = s2.mirrored_by(s1);
            let (Some(t1), Some(t2)) = (s1.crossing(radar, image), s2_unfolded.crossing(radar, image)) else {
                continue;
            };
            // Perpendicular pairs only meet at their shared edge, which has
            // no specular double bounce back to a monostatic radar.
            if t2 - t1 < 1e-9 {
                continue;
            }
            let segs = [t1 * total, (t2 - t1) * total, (1.0 - t2) * total];
            let rel = sub(radar, image);
            let rate = dot(rel, sub(v, image_v)) / total;
            paths.push(PropagationPath {
                total_length: total,
                radial_velocity: 0.5 * rate,
                received_power: multipath_power(params, &segs, &[sigma_w, sigma_w]),
                n_reflections: 2,
                is_lrp_path: false,
            });
        }
    }

    // radar -> s1 -> reflector -> s2 -> radar.
    for lrp in &layout.lrps {
        let l = [lrp.x, lrp.y, lrp.z];
        for s1 in &surfaces {
            for s2 in &surfaces {
                if s1.distance(l) < 1e-9 || s2.distance(l) < 1e-9 {
                    continue;
                }
                let (img1, img2) = (s1.reflect(radar), s2.reflect(radar));
                let (Some(t1), Some(t2)) = (s1.crossing(img1, l), s2.crossing(img2, l)) else {
                    continue;
                };
                let (leg1, leg2) = (norm(sub(img1, l)), norm(sub(img2, l)));
                let rate1 = dot(sub(img1, l), s1.reflect_velocity(v)) / leg1;
                let rate2 = dot(sub(img2, l), s2.reflect_velocity(v)) / leg2;
                let segs = [t1 * leg1, (1.0 - t1) * leg1, (1.0 - t2) * leg2, t2 * leg2];
                paths.push(PropagationPath {
                    total_length: leg1 + leg2,
                    radial_velocity: 0.5 * (rate1 + rate2),
                    received_power: multipath_power(params, &segs, &[sigma_w, lrp.rcs, sigma_w]),
                    n_reflections: 3,
                    is_lrp_path: false,
                });
            }
        }
    }
    paths
}
