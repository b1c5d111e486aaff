//! Tracks four reflectors along a straight drive and compares the tracked
//! fingerprint with the true one.

use lrp_radar::geometry::{fingerprint, Lrp, LrpLayout, Point2, Room};
use lrp_radar::radar::{cfar_detect, simulate_channel, synthesize_map, CfarConfig, ChannelConfig, RadarParams};
use lrp_radar::scenario::interpolate_path;
use lrp_radar::tracking::{TrackSet, TrackingConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> lrp_radar::Result<()> {
    let params = RadarParams::proof_of_concept();
    let room = Room::new(5.0, 5.0, 4.0)?;
    let layout = LrpLayout::new(
        [(1.1, 0.8), (3.9, 1.4), (2.2, 4.1), (4.3, 3.6)]
            .iter()
            .map(|&(x, y)| Lrp::new(x, y, 3.0, 0, 1.05))
            .collect(),
        0.5,
    )?;
    let path = interpolate_path(&[Point2::new(0.8, 2.5), Point2::new(4.2, 2.5)], 2.0, 0.25, 0)?;
    let mut tracks = TrackSet::new(&layout, TrackingConfig::for_radar(&params))?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (k, s) in path.iter().enumerate() {
        let paths = simulate_channel(&layout, &room, &s.pose, s.velocity, &params, &ChannelConfig::default());
        let map = synthesize_map(&paths, &params, 0.0, &mut rng);
        let dets = cfar_detect(&map, &params, &CfarConfig::default())?;
        let assoc = tracks.step(&dets, 0.25)?;
        let truth = fingerprint(&layout, &s.pose);
        let err = assoc.fingerprint.max_abs_diff(&truth).unwrap_or(f64::NAN);
        println!(
            "step {:2}  {} detections  max |error| {:.3} m{}",
            k + 1,
            dets.len(),
            err,
            if assoc.degraded { "  (coasting)" } else { "" }
        );
    }
    Ok(())
}
