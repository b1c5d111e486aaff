use serde::{Deserialize, Serialize};

use super::{estimate_rcs, RadarParams, RangeDopplerMap};
use crate::error::{Error, Result};

/// 2D cell-averaging CFAR settings. Windows are square, measured in cells on
/// each side of the cell under test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CfarConfig {
    pub train_cells: usize,
    pub guard_cells: usize,
    /// Multiplier on the mean training-cell power.
    pub threshold_factor: f64,
}

impl CfarConfig {
    /// Number of training cells in the window.
    pub fn n_train(train_cells: usize, guard_cells: usize) -> usize {
        let outer = 2 * (train_cells + guard_cells) + 1;
        let inner = 2 * guard_cells + 1;
        outer * outer - inner * inner
    }

    /// Threshold factor giving false-alarm probability `pfa` in
    /// exponentially distributed noise.
    pub fn from_pfa(train_cells: usize, guard_cells: usize, pfa: f64) -> Result<Self> {
        if train_cells == 0 {
            return Err(Error::InvalidArgument("CFAR needs at least one training cell".into()));
        }
        if !(pfa > 0.0 && pfa < 1.0) {
            return Err(Error::InvalidArgument(format!("CFAR pfa must be in (0, 1), got {pfa}")));
        }
        let n = Self::n_train(train_cells, guard_cells) as f64;
        Ok(Self {
            train_cells,
            guard_cells,
            threshold_factor: n * (pfa.powf(-1.0 / n) - 1.0),
        })
    }
}

impl Default for CfarConfig {
    fn default() -> Self {
        Self::from_pfa(8, 2, 1e-4).expect("valid defaults")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    /// One-way range, m.
    pub range: f64,
    pub radial_velocity: f64,
    /// RCS from the inverted radar equation; 0 in the zero-range bin.
    pub estimated_rcs: f64,
    /// Power summed over the 3×3 neighbourhood of the peak.
    pub power: f64,
    pub range_bin: usize,
    pub doppler_bin: usize,
}

/// Summed-area table over the map tiled with `pad` cells of wrap-around on
/// every side.
struct WrappedSums {
    pad: i64,
    cols: usize,
    table: Vec<f64>,
}

impl WrappedSums {
    fn new(map: &RangeDopplerMap, pad: usize) -> Self {
        let rows = map.n_range() + 2 * pad;
        let cols = map.n_doppler() + 2 * pad;
        let mut table = vec![0.0; (rows + 1) * (cols + 1)];
        for i in 0..rows {
            let mut row = 0.0;
            for j in 0..cols {
                row += map.get_wrapped(i as i64 - pad as i64, j as i64 - pad as i64);
                table[(i + 1) * (cols + 1) + j + 1] = table[i * (cols + 1) + j + 1] + row;
            }
        }
        Self {
            pad: pad as i64,
            cols,
            table,
        }
    }

    /// Sum over the square of half-width `h` centred on map cell (r, d).
    fn square(&self, r: usize, d: usize, h: usize) -> f64 {
        let w = self.cols + 1;
        let (h, r, d) = (h as i64, r as i64 + self.pad, d as i64 + self.pad);
        let (r0, r1) = ((r - h) as usize, (r + h + 1) as usize);
        let (d0, d1) = ((d - h) as usize, (d + h + 1) as usize);
        self.table[r1 * w + d1] - self.table[r0 * w + d1] - self.table[r1 * w + d0] + self.table[r0 * w + d0]
    }
}

fn is_local_max(map: &RangeDopplerMap, r: usize, d: usize) -> bool {
    let v = map.get(r, d);
    let n_d = map.n_doppler() as i64;
    let here = r as i64 * n_d + d as i64;
    for dr in -1..=1i64 {
        for dd in -1..=1i64 {
            if dr == 0 && dd == 0 {
                continue;
            }
            let rr = (r as i64 + dr).rem_euclid(map.n_range() as i64);
            let cc = (d as i64 + dd).rem_euclid(n_d);
            let other = map.get(rr as usize, cc as usize);
            // Equal neighbours: the lower flat index wins.
            if other > v || (other == v && rr * n_d + cc < here) {
                return false;
            }
        }
    }
    true
}

/// Runs CA-CFAR over the map with wrap-around at the edges and reports the
/// local maxima that exceed their threshold.
pub fn cfar_detect(map: &RangeDopplerMap, params: &RadarParams, cfg: &CfarConfig) -> Result<Vec<Detection>> {
    let outer = cfg.train_cells + cfg.guard_cells;
    if 2 * outer + 1 > map.n_range().min(map.n_doppler()) {
        return Err(Error::InvalidArgument(format!(
            "CFAR window of {} cells does not fit a {}x{} map",
            2 * outer + 1,
            map.n_range(),
            map.n_doppler()
        )));
    }
    let sums = WrappedSums::new(map, outer);
    let n_train = CfarConfig::n_train(cfg.train_cells, cfg.guard_cells) as f64;
    let mut out = Vec::new();
    for r in 0..map.n_range() {
        for d in 0..map.n_doppler() {
            let cut = map.get(r, d);
            if cut <= 0.0 {
                continue;
            }
            let noise = (sums.square(r, d, outer) - sums.square(r, d, cfg.guard_cells)) / n_train;
            if cut <= cfg.threshold_factor * noise || !is_local_max(map, r, d) {
                continue;
            }
            let power = sums.square(r, d, 1);
            let range = RangeDopplerMap::range_of_bin(r, params);
            let estimated_rcs = if r == 0 { 0.0 } else { estimate_rcs(power, range, params)? };
            out.push(Detection {
                range,
                radial_velocity: RangeDopplerMap::velocity_of_bin(d, params),
                estimated_rcs,
                power,
                range_bin: r,
                doppler_bin: d,
            });
        }
    }
    Ok(out)
}
