//! Slant-distance fingerprints of a few positions and their quantized keys.

use lrp_radar::geometry::{fingerprint, Lrp, LrpLayout, Pose};

fn main() -> lrp_radar::Result<()> {
    let layout = LrpLayout::new(
        vec![
            Lrp::new(1.1, 0.8, 3.0, 0, 1.0),
            Lrp::new(3.9, 1.4, 3.0, 0, 1.0),
            Lrp::new(2.2, 4.1, 3.0, 1, 1.0),
            Lrp::new(4.3, 3.6, 3.0, 1, 1.0),
        ],
        0.5,
    )?;
    for (x, y) in [(1.0, 1.0), (2.5, 2.5), (4.0, 4.0)] {
        let fp = fingerprint(&layout, &Pose::new(x, y, 0.0));
        let q = fp.quantize(0.075);
        println!("({x}, {y})");
        println!("  type 0: {:?}", fp.distances(0));
        println!("  type 1: {:?}", fp.distances(1));
        println!("  key:    {:?}", q.key());
    }
    Ok(())
}
