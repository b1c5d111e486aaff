//! Random layout search followed by a brute-force ambiguity scan of the
//! winner.

use lrp_radar::ambiguity::{brute_force_scan, generate_layout, SearchConfig};
use lrp_radar::geometry::Room;

fn main() -> lrp_radar::Result<()> {
    let room = Room::new(5.0, 5.0, 4.0)?;
    for n_types in [1, 2] {
        let cfg = SearchConfig {
            n_types,
            ..SearchConfig::default()
        };
        let (layout, report) = generate_layout(&room, &cfg, 42)?;
        println!("{n_types} type(s): {report:?}");
        for l in &layout.lrps {
            println!("  ({:.3}, {:.3}, {:.1}) type {}", l.x, l.y, l.z, l.type_label);
        }
        let pairs = brute_force_scan(&layout, &room, 0.05, 0.0375)?;
        let widest = pairs.iter().map(|p| p.separation()).fold(0.0, f64::max);
        println!("  {} ambiguous pairs, widest separation {widest:.2} m", pairs.len());
    }
    Ok(())
}
