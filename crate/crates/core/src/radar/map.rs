use rand::Rng;
use rand_distr::{Distribution, Exp1};

use super::{PropagationPath, RadarParams};

/// Separable 3-tap raised-cosine spread applied around each path's bin.
pub const SPREAD_KERNEL: [f64; 3] = [0.25, 0.5, 0.25];

/// Power spectrum over range bins × Doppler bins, row-major by range.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeDopplerMap {
    n_range: usize,
    n_doppler: usize,
    data: Vec<f64>,
}

impl RangeDopplerMap {
    pub fn zeros(n_range: usize, n_doppler: usize) -> Self {
        Self {
            n_range,
            n_doppler,
            data: vec![0.0; n_range * n_doppler],
        }
    }

    pub fn from_fn(n_range: usize, n_doppler: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut map = Self::zeros(n_range, n_doppler);
        for r in 0..n_range {
            for d in 0..n_doppler {
                map.data[r * n_doppler + d] = f(r, d);
            }
        }
        map
    }

    pub fn n_range(&self) -> usize {
        self.n_range
    }

    pub fn n_doppler(&self) -> usize {
        self.n_doppler
    }

    pub fn get(&self, range_bin: usize, doppler_bin: usize) -> f64 {
        self.data[range_bin * self.n_doppler + doppler_bin]
    }

    /// Cell access with wrap-around in both axes.
    pub fn get_wrapped(&self, range_bin: i64, doppler_bin: i64) -> f64 {
        let r = range_bin.rem_euclid(self.n_range as i64) as usize;
        let d = doppler_bin.rem_euclid(self.n_doppler as i64) as usize;
        self.get(r, d)
    }

    pub fn add_wrapped(&mut self, range_bin: i64, doppler_bin: i64, power: f64) {
        let r = range_bin.rem_euclid(self.n_range as i64) as usize;
        let d = doppler_bin.rem_euclid(self.n_doppler as i64) as usize;
        self.data[r * self.n_doppler + d] += power;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn total_power(&self) -> f64 {
        self.data.iter().sum()
    }

    /// (range bin, Doppler bin) of the strongest cell, first in row-major
    /// order on ties.
    pub fn argmax(&self) -> (usize, usize) {
        let mut best = 0;
        for (i, &v) in self.data.iter().enumerate() {
            if v > self.data[best] {
                best = i;
            }
        }
        (best / self.n_doppler, best % self.n_doppler)
    }

    /// Range bin of a one-way distance, before wrap-around.
    pub fn range_bin_of(distance: f64, params: &RadarParams) -> i64 {
        (distance / params.range_resolution).round() as i64
    }

    /// Doppler bin of a radial velocity, before wrap-around. Zero velocity
    /// sits at bin `n_doppler / 2`.
    pub fn doppler_bin_of(velocity: f64, params: &RadarParams) -> i64 {
        (velocity / params.velocity_resolution + (params.n_doppler_bins / 2) as f64).round() as i64
    }

    pub fn range_of_bin(bin: usize, params: &RadarParams) -> f64 {
        bin as f64 * params.range_resolution
    }

    pub fn velocity_of_bin(bin: usize, params: &RadarParams) -> f64 {
        (bin as f64 - (params.n_doppler_bins / 2) as f64) * params.velocity_resolution
    }
}

/// Deposits every path's power at its range/Doppler bin with a 3×3 spread.
/// Ranges beyond `d_max` and velocities outside `[-v_max, v_max)` alias.
/// With `noise_floor > 0` each cell gets independent exponential noise of
/// that mean (the power of circular complex Gaussian noise).
pub fn synthesize_map<R: Rng + ?Sized>(
    paths: &[PropagationPath],
    params: &RadarParams,
    noise_floor: f64,
    rng: &mut R,
) -> RangeDopplerMap {
    let mut map = RangeDopplerMap::zeros(params.n_range_bins, params.n_doppler_bins);
    for path in paths {
        let rb = RangeDopplerMap::range_bin_of(path.one_way_length(), params);
        let db = RangeDopplerMap::doppler_bin_of(path.radial_velocity, params);
        for (i, wr) in SPREAD_KERNEL.iter().enumerate() {
            for (j, wd) in SPREAD_KERNEL.iter().enumerate() {
                map.add_wrapped(rb + i as i64 - 1, db + j as i64 - 1, path.received_power * wr * wd);
            }
        }
    }
    if noise_floor > 0.0 {
        for cell in &mut map.data {
            let e: f64 = Exp1.sample(rng);
            *cell += noise_floor * e;
        }
    }
    map
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn path(one_way: f64, v: f64, power: f64) -> PropagationPath {
        PropagationPath {
            total_length: 2.0 * one_way,
            radial_velocity: v,
            received_power: power,
            n_reflections: 1,
            is_lrp_path: true,
        }
    }

    #[test]
    fn static_path_lands_in_expected_bin() {
        let p = RadarParams::proof_of_concept();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let map = synthesize_map(&[path(7.5, 0.0, 1.0)], &p, 0.0, &mut rng);
        assert_eq!(map.argmax(), (100, 16));
        assert_eq!(map.get(100, 16), 0.25);
    }

    #[test]
    fn empty_is_all_zero() {
        let p = RadarParams::proof_of_concept();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let map = synthesize_map(&[], &p, 0.0, &mut rng);
        assert!(map.as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn coincident_paths_add() {
        let p = RadarParams::proof_of_concept();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let one = synthesize_map(&[path(3.0, 1.0, 2.0)], &p, 0.0, &mut rng);
        let two = synthesize_map(&[path(3.0, 1.0, 2.0), path(3.0, 1.0, 2.0)], &p, 0.0, &mut rng);
        for (a, b) in one.as_slice().iter().zip(two.as_slice()) {
            assert_relative_eq!(2.0 * a, *b);
        }
    }

    #[test]
    fn energy_is_conserved_with_aliasing() {
        let p = RadarParams::proof_of_concept();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let paths = [path(0.0, -5.6, 1.0), path(19.1, 5.6, 3.0), path(25.0, 9.0, 0.5), path(4.0, 0.3, 1e-9)];
        let map = synthesize_map(&paths, &p, 0.0, &mut rng);
        assert_relative_eq!(map.total_power(), 4.5 + 1e-9, max_relative = 1e-9);
    }

    #[test]
    fn noise_floor_has_requested_mean() {
        let p = RadarParams::proof_of_concept();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let map = synthesize_map(&[], &p, 2.0, &mut rng);
        let mean = map.total_power() / (map.n_range() * map.n_doppler()) as f64;
        assert!((mean - 2.0).abs() < 0.1, "mean {mean}");
    }
}
