//! Systematic ambiguities: mirror images of a reflector pair, the ambiguity
//! lines of three reflectors, and the four-reflector condition.

use lrp_radar::ambiguity::{four_lrp_clearance, four_lrp_condition, mirror_ambiguities, three_lrp_ambiguity_lines};
use lrp_radar::geometry::{Lrp, LrpLayout, Point2};

fn main() -> lrp_radar::Result<()> {
    let (a, b) = (Point2::new(1.0, 1.0), Point2::new(4.0, 2.0));
    let p = Point2::new(1.5, 3.0);
    println!("mirror images of {p:?}:");
    for m in mirror_ambiguities(a, b, p)? {
        println!("  {m:?}  d = ({:.4}, {:.4})", m.distance(a), m.distance(b));
    }
    println!("  original d = ({:.4}, {:.4})", p.distance(a), p.distance(b));

    let c = Point2::new(2.0, 4.5);
    for (i, line) in three_lrp_ambiguity_lines(a, b, c)?.iter().enumerate() {
        println!("ambiguity line {i}: through {:?} along {:?}", line.anchor, line.direction);
    }

    let square = LrpLayout::new(
        [(1.0, 1.0), (4.0, 1.0), (4.0, 4.0), (1.0, 4.0)]
            .iter()
            .map(|&(x, y)| Lrp::new(x, y, 3.0, 0, 1.0))
            .collect(),
        0.0,
    )?;
    let skewed = LrpLayout::new(
        [(1.1, 0.8), (3.9, 1.4), (2.2, 4.1), (4.3, 3.6)]
            .iter()
            .map(|&(x, y)| Lrp::new(x, y, 3.0, 0, 1.0))
            .collect(),
        0.0,
    )?;
    for (name, l) in [("square", &square), ("skewed", &skewed)] {
        println!(
            "{name}: condition {} (clearance {:.3} m)",
            four_lrp_condition(l)?,
            four_lrp_clearance(l)?
        );
    }
    Ok(())
}
