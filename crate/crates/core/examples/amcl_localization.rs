//! Monte Carlo localization from exact fingerprints along a path with an
//! L-shaped turn, starting from a uniform prior.

use lrp_radar::geometry::{fingerprint, Lrp, LrpLayout, Point2, Room};
use lrp_radar::positioning::{Amcl, AmclConfig, Prior};
use lrp_radar::scenario::interpolate_path;

fn main() -> lrp_radar::Result<()> {
    let room = Room::new(5.0, 5.0, 4.0)?;
    let layout = LrpLayout::new(
        [(1.1, 0.8), (3.9, 1.4), (2.2, 4.1), (4.3, 3.6)]
            .iter()
            .map(|&(x, y)| Lrp::new(x, y, 3.0, 0, 1.0))
            .collect(),
        0.5,
    )?;
    let waypoints = [Point2::new(1.0, 1.0), Point2::new(3.5, 1.0), Point2::new(3.5, 3.5)];
    let path = interpolate_path(&waypoints, 2.0, 0.25, 0)?;
    let mut amcl = Amcl::new(AmclConfig::default(), layout.clone(), room, &Prior::Uniform, 11)?;
    for (k, s) in path.iter().enumerate() {
        let out = amcl.step(&fingerprint(&layout, &s.pose), &s.odometry)?;
        println!(
            "step {:2}  {:5} particles  estimate ({:.3}, {:.3})  error {:.3} m",
            k + 1,
            out.n_particles,
            out.estimate.x,
            out.estimate.y,
            out.estimate.position().distance(s.pose.position())
        );
    }
    Ok(())
}
