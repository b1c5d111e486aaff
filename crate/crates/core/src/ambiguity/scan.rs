use std::collections::HashMap;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{planar_fingerprint, LrpLayout, Point2, Room};

/// Two grid positions whose planar fingerprints agree within the scan
/// tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmbiguityPair {
    pub p: Point2,
    pub q: Point2,
    /// Largest elementwise fingerprint difference.
    pub distance_gap: f64,
}

impl AmbiguityPair {
    pub fn separation(&self) -> f64 {
        self.p.distance(self.q)
    }
}

/// Grid coordinates `0, step, 2*step, ...` up to `extent` inclusive.
fn axis(extent: f64, step: f64) -> Vec<f64> {
    let n = (extent / step + 1e-9).floor() as usize;
    (0..=n).map(|i| i as f64 * step).collect()
}

/// Enumerates all grid positions in the room and reports every unordered pair
/// whose per-type sorted planar distance lists differ by at most `tol` in
/// every element, ignoring pairs closer than `2 * grid_step`.
///
/// Output is sorted by grid index of `p`, then `q`, and does not depend on the
/// thread count.
pub fn brute_force_scan(
    layout: &LrpLayout,
    room: &Room,
    grid_step: f64,
    tol: f64,
) -> Result<Vec<AmbiguityPair>> {
    if !(grid_step > 0.0) || !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "grid_step and tol must be > 0, got {grid_step} and {tol}"
        )));
    }
    let xs = axis(room.width, grid_step);
    let ys = axis(room.depth, grid_step);
    let points: Vec<Point2> = xs
        .iter()
        .flat_map(|&x| ys.iter().map(move |&y| Point2::new(x, y)))
        .collect();
    let fps: Vec<Vec<f64>> = points
        .par_iter()
        .map(|&p| planar_fingerprint(layout, p).to_vector())
        .collect();

    // Any pair within `tol` elementwise lands in adjacent buckets of the first
    // two fingerprint elements.
    let key_dims = fps[0].len().min(2);
    let bucket_of = |fp: &[f64]| -> [i64; 2] {
        let mut key = [0i64; 2];
        for (k, &d) in key.iter_mut().zip(&fp[..key_dims]) {
            *k = (d / tol).floor() as i64;
        }
        key
    };
    let mut buckets: HashMap<[i64; 2], Vec<usize>> = HashMap::new();
    for (i, fp) in fps.iter().enumerate() {
        buckets.entry(bucket_of(fp)).or_default().push(i);
    }

    let min_sep = 2.0 * grid_step;
    let offsets: Vec<[i64; 2]> = match key_dims {
        1 => (-1..=1).map(|a| [a, 0]).collect(),
        _ => (-1..=1).flat_map(|a| (-1..=1).map(move |b| [a, b])).collect(),
    };
    let mut pairs: Vec<(usize, usize, f64)> = (0..points.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let key = bucket_of(&fps[i]);
            let mut found = Vec::new();
            for off in &offsets {
                let Some(members) = buckets.get(&[key[0] + off[0], key[1] + off[1]]) else {
                    continue;
                };
                for &j in members {
                    if j <= i || points[i].distance(points[j]) <= min_sep {
                        continue;
                    }
                    let gap = fps[i]
                        .iter()
                        .zip(&fps[j])
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max);
                    if gap <= tol {
                        found.push((i, j, gap));
                    }
                }
            }
            found
        })
        .collect();
    pairs.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
    Ok(pairs
        .into_iter()
        .map(|(i, j, gap)| AmbiguityPair {
            p: points[i],
            q: points[j],
            distance_gap: gap,
        })
        .collect())
}

/// Writes pairs as CSV with columns `p_x,p_y,q_x,q_y,gap_m`.
pub fn write_pairs_csv<W: Write>(pairs: &[AmbiguityPair], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["p_x", "p_y", "q_x", "q_y", "gap_m"])?;
    for pair in pairs {
        w.write_record([
            pair.p.x.to_string(),
            pair.p.y.to_string(),
            pair.q.x.to_string(),
            pair.q.y.to_string(),
            pair.distance_gap.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
