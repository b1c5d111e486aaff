//! End-to-end simulation: scenario files, path sampling, the per-step
//! radar → tracking → positioning pipeline, and reports.

mod path;
mod report;
mod run;

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

pub use path::{interpolate_path, PathSample};
pub use report::{emit_report, Report, StepRecord, StepStats, Summary, CONVERGED_FROM_STEP};
pub use run::{run_resolved, run_scenario};

use crate::ambiguity::{generate_layout, SearchConfig, SearchConstraints, SearchReport};
use crate::error::{Error, Result};
use crate::geometry::{LayoutFile, Lrp, LrpLayout, Point2, Room};
use crate::positioning::AmclConfig;
use crate::radar::{CfarConfig, ChannelConfig, RadarConfig, RadarParams};
use crate::tracking::TrackingConfig;

/// Which positioners to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Lut,
    Amcl,
    #[default]
    Both,
}

impl Method {
    pub fn uses_lut(self) -> bool {
        matches!(self, Method::Lut | Method::Both)
    }

    pub fn uses_amcl(self) -> bool {
        matches!(self, Method::Amcl | Method::Both)
    }
}

/// Where the reflector layout comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum LayoutSource {
    Explicit { lrps: Vec<Lrp> },
    Search(SearchSection),
    /// A layout file as written by `plan-layout`, relative to the scenario.
    File { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchSection {
    pub n_lrps: usize,
    pub n_types: usize,
    pub n_candidates: usize,
    pub lrp_height: f64,
    pub lrp_rcs: Option<f64>,
    pub constraints: SearchConstraints,
    pub grid_step: f64,
    pub tol: f64,
    /// Search seed; the scenario seed when absent.
    pub seed: Option<u64>,
}

impl Default for SearchSection {
    fn default() -> Self {
        let d = SearchConfig::default();
        Self {
            n_lrps: d.n_lrps,
            n_types: d.n_types,
            n_candidates: d.n_candidates,
            lrp_height: d.lrp_height,
            lrp_rcs: None,
            constraints: d.constraints,
            grid_step: d.grid_step,
            tol: d.tol,
            seed: None,
        }
    }
}

/// Optional tracking overrides; missing values scale with the radar.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrackingSection {
    pub gate_m: Option<f64>,
    pub w_rcs_db: Option<f64>,
    pub w_dist_m: Option<f64>,
    pub process_noise: Option<f64>,
    pub velocity_var: Option<f64>,
    pub r_var: Option<f64>,
    pub miss_cost: Option<f64>,
}

impl TrackingSection {
    pub fn resolve(&self, params: &RadarParams) -> TrackingConfig {
        let d = TrackingConfig::for_radar(params);
        TrackingConfig {
            gate: self.gate_m.unwrap_or(d.gate),
            w_rcs_db: self.w_rcs_db.unwrap_or(d.w_rcs_db),
            w_dist: self.w_dist_m.unwrap_or(d.w_dist),
            process_noise: self.process_noise.unwrap_or(d.process_noise),
            velocity_var: self.velocity_var.unwrap_or(d.velocity_var),
            r_var: self.r_var.unwrap_or(d.r_var),
            miss_cost: self.miss_cost.unwrap_or(d.miss_cost),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LutSection {
    /// Quantization step; the range resolution when absent.
    pub bin_width_m: Option<f64>,
    pub fine_step_m: f64,
}

impl Default for LutSection {
    fn default() -> Self {
        Self {
            bin_width_m: None,
            fine_step_m: 0.01,
        }
    }
}

/// Replaces the estimated fingerprint at one step with the true fingerprint
/// of another position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fault {
    /// 1-based step index.
    pub step: usize,
    pub fingerprint_of: Point2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub room: Room,
    /// Antenna height above the floor; overrides a layout file's value.
    #[serde(default)]
    pub radar_height: Option<f64>,
    pub layout: LayoutSource,
    pub waypoints: Vec<Point2>,
    pub speed_mps: f64,
    pub period_s: f64,
    /// Extra epochs at rest on the final waypoint.
    #[serde(default)]
    pub dwell_steps: usize,
    #[serde(default)]
    pub radar: RadarConfig,
    #[serde(default)]
    pub tracking: TrackingSection,
    #[serde(default)]
    pub amcl: AmclConfig,
    #[serde(default)]
    pub lut: LutSection,
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub method: Method,
    /// AMCL iterations at the first pose before scoring starts.
    #[serde(default)]
    pub warmup_steps: usize,
    #[serde(default)]
    pub faults: Vec<Fault>,
    /// Directory that relative paths resolve against.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

fn default_runs() -> usize {
    1
}

/// A scenario with every derived quantity computed.
#[derive(Debug, Clone)]
pub struct ResolvedScenario {
    pub scenario: Scenario,
    pub room: Room,
    pub layout: LrpLayout,
    pub search: Option<SearchReport>,
    pub params: RadarParams,
    pub cfar: CfarConfig,
    pub channel: ChannelConfig,
    pub tracking: TrackingConfig,
    pub bin_width: f64,
    pub samples: Vec<PathSample>,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let s: Scenario = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::config(if path == "." { String::new() } else { path }, e.inner().to_string())
        })?;
        s.validate()?;
        Ok(s)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let mut s = Self::from_json(&text)?;
        s.base_dir = path.parent().map(Path::to_path_buf);
        Ok(s)
    }

    /// Field-level checks that need no derived quantities.
    pub fn validate(&self) -> Result<()> {
        let bad = |path: &str, msg: String| Err(Error::config(path, msg));
        if let Err(e) = self.room.validate() {
            return bad("room", e.to_string());
        }
        if self.waypoints.len() < 2 {
            return bad("waypoints", format!("need at least 2 waypoints, got {}", self.waypoints.len()));
        }
        for (i, w) in self.waypoints.iter().enumerate() {
            if !self.room.contains_planar(*w) {
                return bad(&format!("waypoints[{i}]"), format!("({}, {}) is outside the room", w.x, w.y));
            }
        }
        if !(self.speed_mps > 0.0 && self.speed_mps.is_finite()) {
            return bad("speed_mps", format!("must be > 0, got {}", self.speed_mps));
        }
        if !(self.period_s > 0.0 && self.period_s.is_finite()) {
            return bad("period_s", format!("must be > 0, got {}", self.period_s));
        }
        if self.runs == 0 {
            return bad("runs", "must be >= 1".into());
        }
        if let Some(h) = self.radar_height {
            if !(0.0..=self.room.height).contains(&h) {
                return bad("radar_height", format!("must lie in [0, {}], got {h}", self.room.height));
            }
        }
        if let Err(e) = self.amcl.validate() {
            return bad("amcl", e.to_string());
        }
        if let Err(e) = self.radar.params() {
            return bad("radar", e.to_string());
        }
        if let Err(e) = self.radar.cfar_config() {
            return bad("radar.cfar", e.to_string());
        }
        for (i, f) in self.faults.iter().enumerate() {
            if f.step == 0 {
                return bad(&format!("faults[{i}].step"), "steps are numbered from 1".into());
            }
        }
        Ok(())
    }

    fn resolve_layout(&self) -> Result<(LrpLayout, Option<SearchReport>)> {
        let height = self.radar_height.unwrap_or(0.0);
        let (layout, report) = match &self.layout {
            LayoutSource::Explicit { lrps } => (LrpLayout::new(lrps.clone(), height)?, None),
            LayoutSource::Search(s) => {
                let mut cfg = SearchConfig {
                    n_lrps: s.n_lrps,
                    n_types: s.n_types,
                    n_candidates: s.n_candidates,
                    lrp_height: s.lrp_height,
                    radar_height: height,
                    constraints: s.constraints,
                    grid_step: s.grid_step,
                    tol: s.tol,
                    ..SearchConfig::default()
                };
                if let Some(rcs) = s.lrp_rcs {
                    cfg.lrp_rcs = rcs;
                }
                let (layout, report) = generate_layout(&self.room, &cfg, s.seed.unwrap_or(self.seed))?;
                (layout, Some(report))
            }
            LayoutSource::File { path } => {
                let full = match &self.base_dir {
                    Some(dir) if path.is_relative() => dir.join(path),
                    _ => path.clone(),
                };
                let file = LayoutFile::read(&full).map_err(|e| match e {
                    Error::Config { path: p, message } => Error::config(format!("layout.path -> {p}"), message),
                    other => Error::config("layout.path", format!("{}: {other}", full.display())),
                })?;
                let layout = LrpLayout::new(file.lrps, self.radar_height.unwrap_or(file.radar_height))?;
                (layout, None)
            }
        };
        layout
            .validate_in(&self.room)
            .map_err(|e| Error::config("layout", e.to_string()))?;
        Ok((layout, report))
    }

    /// Builds the layout, radar parameters and path samples.
    pub fn resolve(&self) -> Result<ResolvedScenario> {
        self.validate()?;
        let (layout, search) = self.resolve_layout()?;
        let params = self.radar.params()?;
        let bin_width = self.lut.bin_width_m.unwrap_or(params.range_resolution);
        let samples = interpolate_path(&self.waypoints, self.speed_mps, self.period_s, self.dwell_steps)?;
        for (i, f) in self.faults.iter().enumerate() {
            if f.step > samples.len() {
                return Err(Error::config(
                    format!("faults[{i}].step"),
                    format!("step {} is past the last step {}", f.step, samples.len()),
                ));
            }
        }
        Ok(ResolvedScenario {
            room: self.room,
            layout,
            search,
            params,
            cfar: self.radar.cfar_config()?,
            channel: self.radar.channel_config(),
            tracking: self.tracking.resolve(&params),
            bin_width,
            samples,
            scenario: self.clone(),
        })
    }
}
