use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{brute_force_scan, four_lrp_clearance, AXIS_EPSILON};
use crate::error::{Error, Result};
use crate::geometry::{Lrp, LrpLayout, Point2, Room};
use crate::radar::{rcs_trihedral, wavelength, DEFAULT_CARRIER_HZ};

/// Hard constraints applied to candidates before they are scored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConstraints {
    /// Minimum distance between a reflector and any wall.
    pub wall_clearance: f64,
    /// Minimum planar distance between two reflectors.
    pub min_spacing: f64,
    /// Minimum distance between a symmetry axis and the complementary
    /// midpoint.
    pub axis_margin: f64,
}

impl Default for SearchConstraints {
    fn default() -> Self {
        Self {
            wall_clearance: 0.5,
            min_spacing: 1.0,
            axis_margin: 0.30,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    pub n_lrps: usize,
    pub n_types: usize,
    pub n_candidates: usize,
    /// Common mounting height of all reflectors.
    pub lrp_height: f64,
    pub lrp_rcs: f64,
    pub radar_height: f64,
    pub constraints: SearchConstraints,
    pub grid_step: f64,
    pub tol: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            n_lrps: 4,
            n_types: 1,
            n_candidates: 500,
            lrp_height: 3.0,
            lrp_rcs: rcs_trihedral(0.05, wavelength(DEFAULT_CARRIER_HZ)),
            radar_height: 0.0,
            constraints: SearchConstraints::default(),
            grid_step: 0.05,
            tol: 0.0375,
        }
    }
}

/// Outcome of a layout search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub candidates: usize,
    /// Candidates that met every hard constraint.
    pub feasible: usize,
    /// Index of the selected candidate in draw order.
    pub selected: usize,
    /// Scan pair count of the selected layout.
    pub ambiguity_pairs: usize,
    /// Axis-to-midpoint clearance of the selected layout.
    pub clearance: f64,
}

fn draw_candidate(room: &Room, cfg: &SearchConfig, rng: &mut impl Rng) -> LrpLayout {
    let c = cfg.constraints.wall_clearance;
    let per_type = cfg.n_lrps / cfg.n_types;
    let lrps = (0..cfg.n_lrps)
        .map(|i| {
            let x = rng.random_range(c..=room.width - c);
            let y = rng.random_range(c..=room.depth - c);
            let t = if cfg.n_types == 1 { 0 } else { (i / per_type) as u8 };
            Lrp::new(x, y, cfg.lrp_height, t, cfg.lrp_rcs)
        })
        .collect();
    LrpLayout {
        lrps,
        radar_height: cfg.radar_height,
    }
}

fn min_spacing(layout: &LrpLayout) -> f64 {
    let pts: Vec<Point2> = layout.lrps.iter().map(Lrp::planar).collect();
    let mut best = f64::INFINITY;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            best = best.min(pts[i].distance(pts[j]));
        }
    }
    best
}

/// Random layout search: draws `n_candidates` layouts, keeps those meeting
/// the four-reflector condition with the configured margin and spacing, and
/// returns the one with the fewest scan pairs (earliest draw on ties).
pub fn generate_layout(room: &Room, cfg: &SearchConfig, seed: u64) -> Result<(LrpLayout, SearchReport)> {
    room.validate()?;
    if cfg.n_lrps != 4 {
        return Err(Error::InvalidArgument(format!(
            "layout search supports exactly 4 reflectors, got {}",
            cfg.n_lrps
        )));
    }
    if !(1..=2).contains(&cfg.n_types) {
        return Err(Error::InvalidArgument(format!(
            "n_types must be 1 or 2, got {}",
            cfg.n_types
        )));
    }
    if cfg.n_candidates == 0 {
        return Err(Error::InvalidArgument("n_candidates must be >= 1".into()));
    }
    let c = cfg.constraints.wall_clearance;
    if 2.0 * c >= room.width.min(room.depth) || cfg.lrp_height > room.height {
        return Err(Error::InvalidArgument(
            "wall clearance or reflector height leaves no room for reflectors".into(),
        ));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let candidates: Vec<LrpLayout> = (0..cfg.n_candidates)
        .map(|_| draw_candidate(room, cfg, &mut rng))
        .collect();

    let margin = cfg.constraints.axis_margin.max(AXIS_EPSILON * (1.0 + 1e-9));
    let scored: Vec<(usize, usize, f64)> = candidates
        .par_iter()
        .enumerate()
        .filter_map(|(i, layout)| {
            if min_spacing(layout) < cfg.constraints.min_spacing {
                return None;
            }
            let clearance = four_lrp_clearance(layout).ok()?;
            if clearance < margin {
                return None;
            }
            let pairs = brute_force_scan(layout, room, cfg.grid_step, cfg.tol).ok()?;
            Some((i, pairs.len(), clearance))
        })
        .collect();

    let &(selected, ambiguity_pairs, clearance) = scored
        .iter()
        .min_by_key(|(i, n, _)| (*n, *i))
        .ok_or(Error::SearchExhausted {
            candidates: cfg.n_candidates,
        })?;
    let report = SearchReport {
        candidates: cfg.n_candidates,
        feasible: scored.len(),
        selected,
        ambiguity_pairs,
        clearance,
    };
    Ok((candidates[selected].clone(), report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambiguity::four_lrp_condition;

    fn small_cfg(n_types: usize, n_candidates: usize) -> SearchConfig {
        SearchConfig {
            n_types,
            n_candidates,
            grid_step: 0.1,
            ..SearchConfig::default()
        }
    }

    #[test]
    fn deterministic_for_seed() {
        let room = Room::new(5.0, 5.0, 4.0).unwrap();
        let cfg = small_cfg(1, 20);
        let a = generate_layout(&room, &cfg, 11).unwrap();
        let b = generate_layout(&room, &cfg, 11).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn output_meets_constraints() {
        let room = Room::new(5.0, 5.0, 4.0).unwrap();
        let cfg = small_cfg(1, 30);
        let (layout, report) = generate_layout(&room, &cfg, 3).unwrap();
        assert!(four_lrp_condition(&layout).unwrap());
        assert!(report.clearance >= cfg.constraints.axis_margin);
        assert!(min_spacing(&layout) >= cfg.constraints.min_spacing);
        for l in &layout.lrps {
            assert!(l.x >= 0.5 && l.x <= 4.5 && l.y >= 0.5 && l.y <= 4.5);
            assert_eq!(l.z, 3.0);
        }
        assert!(report.feasible >= 1 && report.feasible <= 30);
    }

    #[test]
    fn single_candidate_accepted_iff_feasible() {
        let room = Room::new(5.0, 5.0, 4.0).unwrap();
        let cfg = small_cfg(1, 1);
        let mut accepted = 0;
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let cand = draw_candidate(&room, &cfg, &mut rng);
            let feasible = min_spacing(&cand) >= 1.0 && four_lrp_clearance(&cand).unwrap() >= 0.3;
            match generate_layout(&room, &cfg, seed) {
                Ok((layout, _)) => {
                    assert!(feasible);
                    assert_eq!(layout, cand);
                    accepted += 1;
                }
                Err(Error::SearchExhausted { candidates }) => {
                    assert!(!feasible);
                    assert_eq!(candidates, 1);
                }
                Err(e) => panic!("{e}"),
            }
        }
        assert!(accepted > 0);
    }

    #[test]
    fn two_type_labels_split_evenly() {
        let room = Room::new(5.0, 5.0, 4.0).unwrap();
        let (layout, _) = generate_layout(&room, &small_cfg(2, 10), 5).unwrap();
        assert_eq!(layout.type_counts(), [2, 2]);
    }

    #[test]
    fn rejects_unsupported_counts() {
        let room = Room::new(5.0, 5.0, 4.0).unwrap();
        let cfg = SearchConfig {
            n_lrps: 3,
            ..small_cfg(1, 1)
        };
        assert!(generate_layout(&room, &cfg, 0).is_err());
        assert!(generate_layout(&room, &small_cfg(3, 1), 0).is_err());
        assert!(generate_layout(&room, &small_cfg(1, 0), 0).is_err());
    }
}
