//! Builds the fingerprint lookup table, saves it, and looks up a few noisy
//! fingerprints.

use lrp_radar::geometry::{fingerprint, Fingerprint, Lrp, LrpLayout, Pose, Room};
use lrp_radar::positioning::{build_lut, lut_lookup, LookupTable};

fn main() -> lrp_radar::Result<()> {
    let room = Room::new(5.0, 5.0, 4.0)?;
    let layout = LrpLayout::new(
        [(1.1, 0.8), (3.9, 1.4), (2.2, 4.1), (4.3, 3.6)]
            .iter()
            .map(|&(x, y)| Lrp::new(x, y, 3.0, 0, 1.0))
            .collect(),
        0.5,
    )?;
    let table = build_lut(&layout, &room, 0.075, 0.01)?;
    println!("{} entries", table.len());

    let path = std::env::temp_dir().join("lrp_lut.json");
    table.write(&path)?;
    let table = LookupTable::read(&path)?;
    println!("saved to {}", path.display());

    for (x, y, noise) in [(1.0, 1.0, 0.0), (2.5, 2.5, 0.02), (3.7, 4.2, -0.03)] {
        let truth = Pose::new(x, y, 0.0);
        let fp = fingerprint(&layout, &truth);
        let noisy = Fingerprint::single(fp.iter().map(|d| d + noise).collect());
        let est = lut_lookup(&table, &noisy)?;
        println!("({x}, {y}) -> ({:.3}, {:.3}), error {:.3} m", est.x, est.y, est.distance(truth.position()));
    }
    Ok(())
}
