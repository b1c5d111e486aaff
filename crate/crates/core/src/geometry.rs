//! Spatial primitives shared by every other module: the room, reflector
//! (LRP) layouts, vehicle poses and distance fingerprints.
//!
//! A fingerprint is the unordered set of distances from the radar to all
//! reflectors, split by reflector type. Reflectors of one type cannot be told
//! apart, so each per-type list is kept sorted ascending and carries no
//! identity information.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of distinguishable reflector types.
pub const NUM_TYPES: usize = 2;

/// A point in the floor plane.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 2D cross product.
    pub fn cross(self, other: Point2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Point2) -> f64 {
        (self - other).norm()
    }

    pub fn midpoint(self, other: Point2) -> Point2 {
        Point2::new(0.5 * (self.x + other.x), 0.5 * (self.y + other.y))
    }

    /// Unit vector rotated by +90 degrees.
    pub fn perp(self) -> Point2 {
        Point2::new(-self.y, self.x)
    }

    pub fn normalized(self) -> Option<Point2> {
        let n = self.norm();
        (n > 0.0 && n.is_finite()).then(|| self * (1.0 / n))
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, rhs: f64) -> Point2 {
        Point2::new(self.x * rhs, self.y * rhs)
    }
}

impl fmt::Display for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:.4}, {:.4})", self.x, self.y)
    }
}

/// Axis-aligned box room with its origin in a floor corner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Room {
    pub width: f64,
    pub depth: f64,
    pub height: f64,
}

impl Room {
    pub fn new(width: f64, depth: f64, height: f64) -> Result<Self> {
        let room = Self {
            width,
            depth,
            height,
        };
        room.validate()?;
        Ok(room)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("width", self.width),
            ("depth", self.depth),
            ("height", self.height),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidRoom(format!("{name} must be > 0, got {v}")));
            }
        }
        Ok(())
    }

    /// Parses `WxDxH`, e.g. `5x5x4`.
    pub fn parse_dims(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(['x', 'X']).collect();
        if parts.len() != 3 {
            return Err(Error::InvalidRoom(format!(
                "expected WIDTHxDEPTHxHEIGHT, got `{s}`"
            )));
        }
        let mut dims = [0.0; 3];
        for (slot, part) in dims.iter_mut().zip(&parts) {
            *slot = part
                .trim()
                .parse()
                .map_err(|_| Error::InvalidRoom(format!("`{part}` is not a number")))?;
        }
        Room::new(dims[0], dims[1], dims[2])
    }

    pub fn contains_planar(&self, p: Point2) -> bool {
        (0.0..=self.width).contains(&p.x) && (0.0..=self.depth).contains(&p.y)
    }

    pub fn contains(&self, x: f64, y: f64, z: f64) -> bool {
        self.contains_planar(Point2::new(x, y)) && (0.0..=self.height).contains(&z)
    }

    pub fn center(&self) -> Point2 {
        Point2::new(0.5 * self.width, 0.5 * self.depth)
    }

    pub fn area(&self) -> f64 {
        self.width * self.depth
    }
}

/// A passive reflector (local reference point).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lrp {
    pub x: f64,
    pub y: f64,
    /// Mounting height.
    pub z: f64,
    #[serde(rename = "type")]
    pub type_label: u8,
    /// Radar cross section in m^2.
    pub rcs: f64,
}

impl Lrp {
    pub fn new(x: f64, y: f64, z: f64, type_label: u8, rcs: f64) -> Self {
        Self {
            x,
            y,
            z,
            type_label,
            rcs,
        }
    }

    pub fn planar(&self) -> Point2 {
        Point2::new(self.x, self.y)
    }
}

/// Reflector layout plus the mounting height of the vehicle's radar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LrpLayout {
    pub lrps: Vec<Lrp>,
    #[serde(default)]
    pub radar_height: f64,
}

impl LrpLayout {
    pub fn new(lrps: Vec<Lrp>, radar_height: f64) -> Result<Self> {
        let layout = Self { lrps, radar_height };
        layout.validate()?;
        Ok(layout)
    }

    pub fn validate(&self) -> Result<()> {
        if self.lrps.is_empty() {
            return Err(Error::InvalidLayout("layout needs at least one LRP".into()));
        }
        if !self.radar_height.is_finite() || self.radar_height < 0.0 {
            return Err(Error::InvalidLayout(format!(
                "radar_height must be >= 0, got {}",
                self.radar_height
            )));
        }
        for (i, lrp) in self.lrps.iter().enumerate() {
            if usize::from(lrp.type_label) >= NUM_TYPES {
                return Err(Error::InvalidLayout(format!(
                    "lrps[{i}]: type must be 0 or 1, got {}",
                    lrp.type_label
                )));
            }
            if !(lrp.rcs > 0.0 && lrp.rcs.is_finite()) {
                return Err(Error::InvalidLayout(format!(
                    "lrps[{i}]: rcs must be > 0, got {}",
                    lrp.rcs
                )));
            }
            if ![lrp.x, lrp.y, lrp.z].iter().all(|v| v.is_finite()) {
                return Err(Error::InvalidLayout(format!("lrps[{i}]: non-finite position")));
            }
        }
        Ok(())
    }

    /// Checks that every reflector lies inside `room`.
    pub fn validate_in(&self, room: &Room) -> Result<()> {
        self.validate()?;
        for (i, lrp) in self.lrps.iter().enumerate() {
            if !room.contains(lrp.x, lrp.y, lrp.z) {
                return Err(Error::InvalidLayout(format!(
                    "lrps[{i}] at ({}, {}, {}) lies outside the room",
                    lrp.x, lrp.y, lrp.z
                )));
            }
        }
        if self.radar_height > room.height {
            return Err(Error::InvalidLayout("radar is mounted above the ceiling".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.lrps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lrps.is_empty()
    }

    /// Number of reflectors of each type.
    pub fn type_counts(&self) -> [usize; NUM_TYPES] {
        let mut counts = [0; NUM_TYPES];
        for lrp in &self.lrps {
            counts[usize::from(lrp.type_label)] += 1;
        }
        counts
    }

    pub fn num_types_used(&self) -> usize {
        self.type_counts().iter().filter(|&&c| c > 0).count()
    }

    /// True when all reflectors share one mounting height.
    pub fn is_coplanar(&self) -> bool {
        let z0 = self.lrps[0].z;
        self.lrps.iter().all(|l| (l.z - z0).abs() <= 1e-9)
    }
}

/// On-disk layout description: the room plus the layout itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutFile {
    pub room: Room,
    pub radar_height: f64,
    pub lrps: Vec<Lrp>,
}

impl LayoutFile {
    pub fn new(room: Room, layout: &LrpLayout) -> Self {
        Self {
            room,
            radar_height: layout.radar_height,
            lrps: layout.lrps.clone(),
        }
    }

    pub fn into_parts(self) -> Result<(Room, LrpLayout)> {
        self.room.validate()?;
        let layout = LrpLayout {
            lrps: self.lrps,
            radar_height: self.radar_height,
        };
        layout.validate_in(&self.room)?;
        Ok((self.room, layout))
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let de = &mut serde_json::Deserializer::from_str(&text);
        serde_path_to_error::deserialize(de)
            .map_err(|e| Error::config(e.path().to_string(), e.inner().to_string()))
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text + "\n")?;
        Ok(())
    }
}

/// Wraps an angle to `[-pi, pi)`.
pub fn wrap_angle(theta: f64) -> f64 {
    let wrapped = (theta + PI).rem_euclid(2.0 * PI) - PI;
    // rem_euclid can round up to exactly 2*pi for tiny negative inputs.
    if wrapped >= PI {
        wrapped - 2.0 * PI
    } else {
        wrapped
    }
}

/// Planar position and heading of the vehicle.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

impl Pose {
    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        Self {
            x,
            y,
            theta: wrap_angle(theta),
        }
    }

    pub fn at(p: Point2) -> Self {
        Self::new(p.x, p.y, 0.0)
    }

    pub fn position(&self) -> Point2 {
        Point2::new(self.x, self.y)
    }
}

/// 3D range between the radar on the vehicle and a reflector.
pub fn slant_distance(lrp: &Lrp, pose: &Pose, radar_height: f64) -> f64 {
    let dx = pose.x - lrp.x;
    let dy = pose.y - lrp.y;
    let dz = radar_height - lrp.z;
    (dx * dx + dy * dy + dz * dz).sqrt()
}

/// Per-type sorted distance lists observed at one position.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Fingerprint {
    by_type: [Vec<f64>; NUM_TYPES],
}

impl Fingerprint {
    /// Builds a fingerprint from unsorted per-type distances.
    pub fn from_unsorted(mut by_type: [Vec<f64>; NUM_TYPES]) -> Self {
        for list in &mut by_type {
            list.sort_by(f64::total_cmp);
        }
        Self { by_type }
    }

    /// Single-type fingerprint.
    pub fn single(distances: Vec<f64>) -> Self {
        Self::from_unsorted([distances, Vec::new()])
    }

    pub fn distances(&self, type_label: usize) -> &[f64] {
        &self.by_type[type_label]
    }

    pub fn by_type(&self) -> &[Vec<f64>; NUM_TYPES] {
        &self.by_type
    }

    pub fn type_counts(&self) -> [usize; NUM_TYPES] {
        [self.by_type[0].len(), self.by_type[1].len()]
    }

    pub fn len(&self) -> usize {
        self.by_type.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Concatenation of the per-type lists, type 0 first.
    pub fn to_vector(&self) -> Vec<f64> {
        self.by_type.iter().flatten().copied().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.by_type.iter().flatten().copied()
    }

    /// Largest elementwise difference; `None` if the per-type counts differ.
    pub fn max_abs_diff(&self, other: &Fingerprint) -> Option<f64> {
        if self.type_counts() != other.type_counts() {
            return None;
        }
        Some(
            self.iter()
                .zip(other.iter())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max),
        )
    }

    pub fn quantize(&self, bin_width: f64) -> QuantizedFingerprint {
        quantize(self, bin_width)
    }
}

/// Fingerprint with every distance replaced by its bin index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QuantizedFingerprint {
    bins: [Vec<u32>; NUM_TYPES],
}

impl QuantizedFingerprint {
    pub fn bins(&self, type_label: usize) -> &[u32] {
        &self.bins[type_label]
    }

    pub fn type_counts(&self) -> [usize; NUM_TYPES] {
        [self.bins[0].len(), self.bins[1].len()]
    }

    /// Flattened key, type 0 first.
    pub fn key(&self) -> Vec<u32> {
        self.bins.iter().flatten().copied().collect()
    }

    pub fn from_key(key: &[u32], type_counts: [usize; NUM_TYPES]) -> Result<Self> {
        if key.len() != type_counts[0] + type_counts[1] {
            return Err(Error::CardinalityMismatch {
                expected: type_counts[0] + type_counts[1],
                got: key.len(),
            });
        }
        let (a, b) = key.split_at(type_counts[0]);
        let mut bins = [a.to_vec(), b.to_vec()];
        for list in &mut bins {
            list.sort_unstable();
        }
        Ok(Self { bins })
    }

    /// Distances at the bin centers, `(i + 0.5) * bin_width`.
    pub fn centers(&self, bin_width: f64) -> Fingerprint {
        let by_type = self
            .bins
            .clone()
            .map(|list| list.iter().map(|&i| (f64::from(i) + 0.5) * bin_width).collect());
        Fingerprint { by_type }
    }
}

/// Slant-range fingerprint of `pose`.
pub fn fingerprint(layout: &LrpLayout, pose: &Pose) -> Fingerprint {
    let mut by_type: [Vec<f64>; NUM_TYPES] = Default::default();
    for lrp in &layout.lrps {
        by_type[usize::from(lrp.type_label)].push(slant_distance(lrp, pose, layout.radar_height));
    }
    Fingerprint::from_unsorted(by_type)
}

/// Fingerprint from distances in the floor plane, ignoring all heights.
pub fn planar_fingerprint(layout: &LrpLayout, p: Point2) -> Fingerprint {
    let mut by_type: [Vec<f64>; NUM_TYPES] = Default::default();
    for lrp in &layout.lrps {
        by_type[usize::from(lrp.type_label)].push(lrp.planar().distance(p));
    }
    Fingerprint::from_unsorted(by_type)
}

/// Floor-bins every distance to `bin_width`. Negative distances clamp to bin 0.
pub fn quantize(fp: &Fingerprint, bin_width: f64) -> QuantizedFingerprint {
    debug_assert!(bin_width > 0.0);
    let bins = fp
        .by_type
        .clone()
        .map(|list| list.iter().map(|&d| (d / bin_width).floor().max(0.0) as u32).collect());
    QuantizedFingerprint { bins }
}
