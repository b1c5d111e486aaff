//! Placement theory for reflector layouts.
//!
//! Two reflectors of one type produce a fingerprint that is symmetric about
//! two axes: the line through both reflectors and their perpendicular
//! bisector. Every position therefore shares its fingerprint with up to three
//! mirror images. With three reflectors, each pair leaves a line of point
//! symmetric ambiguities. A four-reflector layout is free of these systematic
//! ambiguities when no symmetry axis of a pair crosses the midpoint of the
//! complementary pair.
//!
//! Collisions that do not follow from these symmetries (random ambiguities)
//! have no closed form; [`brute_force_scan`] finds them on a grid.

mod scan;
mod search;

pub use scan::{brute_force_scan, write_pairs_csv, AmbiguityPair};
pub use search::{generate_layout, SearchConfig, SearchConstraints, SearchReport};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{LrpLayout, Point2};

/// Tolerance for "an axis passes through a point" in the exact predicate.
pub const AXIS_EPSILON: f64 = 1e-6;

fn reflect_across_line(p: Point2, anchor: Point2, direction: Point2) -> Point2 {
    let rel = p - anchor;
    let along = direction * rel.dot(direction);
    anchor + along * 2.0 - rel
}

/// The three mirror images of `p` with respect to the reflector pair `a`, `b`,
/// in the order: across the perpendicular bisector, across the line through
/// both reflectors, through the midpoint.
///
/// When `p` lies on an axis some images coincide with `p` or each other; use
/// [`distinct_mirror_ambiguities`] to drop those.
pub fn mirror_ambiguities(a: Point2, b: Point2, p: Point2) -> Result<[Point2; 3]> {
    let dir = (b - a).normalized().ok_or_else(|| {
        Error::DegenerateConfiguration("mirror axes need two distinct reflectors".into())
    })?;
    let mid = a.midpoint(b);
    let across_line = reflect_across_line(p, mid, dir);
    let across_bisector = reflect_across_line(p, mid, dir.perp());
    let through_mid = mid * 2.0 - p;
    Ok([across_bisector, across_line, through_mid])
}

/// Mirror images of `p` that differ from `p` and from each other by more
/// than `eps`.
pub fn distinct_mirror_ambiguities(a: Point2, b: Point2, p: Point2, eps: f64) -> Result<Vec<Point2>> {
    let mut out: Vec<Point2> = Vec::with_capacity(3);
    for q in mirror_ambiguities(a, b, p)? {
        if q.distance(p) > eps && out.iter().all(|o| o.distance(q) > eps) {
            out.push(q);
        }
    }
    Ok(out)
}

/// Line of point-symmetric ambiguities left by a pair of a three-reflector
/// layout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmbiguityLine {
    /// Midpoint of the generating pair.
    pub anchor: Point2,
    /// Unit direction.
    pub direction: Point2,
}

impl AmbiguityLine {
    pub fn point_at(&self, t: f64) -> Point2 {
        self.anchor + self.direction * t
    }

    pub fn distance_to(&self, p: Point2) -> f64 {
        (p - self.anchor).cross(self.direction).abs()
    }
}

fn collinear(a: Point2, b: Point2, c: Point2) -> bool {
    let scale = a.distance(b).max(a.distance(c)).max(b.distance(c));
    (b - a).cross(c - a).abs() <= 1e-12 * scale * scale.max(1.0)
}

/// Ambiguity lines for the pairs (1,2), (1,3) and (2,3), in that order.
///
/// Each line passes through the pair's midpoint, perpendicular to the
/// direction towards the third reflector. Point pairs mirrored through the
/// midpoint along the line share all three distances.
pub fn three_lrp_ambiguity_lines(l1: Point2, l2: Point2, l3: Point2) -> Result<[AmbiguityLine; 3]> {
    if collinear(l1, l2, l3) {
        return Err(Error::DegenerateConfiguration(
            "three collinear reflectors have no ambiguity lines".into(),
        ));
    }
    let line = |a: Point2, b: Point2, third: Point2| {
        let anchor = a.midpoint(b);
        let to_third = (third - anchor).normalized().expect("non-collinear");
        AmbiguityLine {
            anchor,
            direction: to_third.perp(),
        }
    };
    Ok([line(l1, l2, l3), line(l1, l3, l2), line(l2, l3, l1)])
}

/// Distance from `point` to the nearer of the two symmetry axes of the pair
/// `a`, `b`. Coincident reflectors have no axes and report 0.
fn axis_clearance(a: Point2, b: Point2, point: Point2) -> f64 {
    let Some(dir) = (b - a).normalized() else {
        return 0.0;
    };
    let rel = point - a.midpoint(b);
    let to_line = rel.cross(dir).abs();
    let to_bisector = rel.dot(dir).abs();
    to_line.min(to_bisector)
}

/// Pairs `[(i, j), (k, l)]` whose symmetry axes must avoid the complementary
/// midpoint.
fn checked_partitions(layout: &LrpLayout) -> Result<Vec<[(usize, usize); 2]>> {
    if layout.len() != 4 {
        return Err(Error::InvalidLayout(format!(
            "the four-LRP condition needs exactly 4 reflectors, got {}",
            layout.len()
        )));
    }
    let counts = layout.type_counts();
    match counts {
        [4, 0] | [0, 4] => Ok(vec![[(0, 1), (2, 3)], [(0, 2), (1, 3)], [(0, 3), (1, 2)]]),
        [2, 2] => {
            let zeros: Vec<usize> = (0..4).filter(|&i| layout.lrps[i].type_label == 0).collect();
            let ones: Vec<usize> = (0..4).filter(|&i| layout.lrps[i].type_label == 1).collect();
            Ok(vec![[(zeros[0], zeros[1]), (ones[0], ones[1])]])
        }
        _ => Err(Error::InvalidLayout(format!(
            "two-type layouts need 2 reflectors of each type, got {counts:?}"
        ))),
    }
}

/// Smallest distance between any checked symmetry axis and the midpoint of
/// its complementary pair. The layout is free of systematic ambiguities iff
/// this is positive.
pub fn four_lrp_clearance(layout: &LrpLayout) -> Result<f64> {
    let pts: Vec<Point2> = layout.lrps.iter().map(|l| l.planar()).collect();
    let mut clearance = f64::INFINITY;
    for [(i, j), (k, l)] in checked_partitions(layout)? {
        let mid_ij = pts[i].midpoint(pts[j]);
        let mid_kl = pts[k].midpoint(pts[l]);
        clearance = clearance
            .min(axis_clearance(pts[i], pts[j], mid_kl))
            .min(axis_clearance(pts[k], pts[l], mid_ij));
    }
    Ok(clearance)
}

/// True iff no symmetry axis passes within [`AXIS_EPSILON`] of the
/// complementary midpoint. One-type layouts check all six pair/complement
/// combinations, two-type layouts only the two same-type pairs.
pub fn four_lrp_condition(layout: &LrpLayout) -> Result<bool> {
    Ok(four_lrp_clearance(layout)? > AXIS_EPSILON)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Lrp;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn p(x: f64, y: f64) -> Point2 {
        Point2::new(x, y)
    }

    fn sorted_dists(p: Point2, lrps: &[Point2]) -> Vec<f64> {
        let mut d: Vec<f64> = lrps.iter().map(|l| l.distance(p)).collect();
        d.sort_by(f64::total_cmp);
        d
    }

    fn layout(pts: &[(f64, f64)], types: &[u8]) -> LrpLayout {
        let lrps = pts
            .iter()
            .zip(types)
            .map(|(&(x, y), &t)| Lrp::new(x, y, 3.0, t, 1.0))
            .collect();
        LrpLayout::new(lrps, 0.0).unwrap()
    }

    #[test]
    fn mirror_example() {
        let imgs = mirror_ambiguities(p(0.0, 0.0), p(2.0, 0.0), p(0.5, 1.0)).unwrap();
        let expected = [p(1.5, 1.0), p(0.5, -1.0), p(1.5, -1.0)];
        for (got, want) in imgs.iter().zip(expected) {
            assert_abs_diff_eq!(got.x, want.x, epsilon = 1e-12);
            assert_abs_diff_eq!(got.y, want.y, epsilon = 1e-12);
        }
    }

    #[test]
    fn mirror_on_axis_dedups() {
        let imgs = distinct_mirror_ambiguities(p(0.0, 0.0), p(2.0, 0.0), p(1.0, 1.0), 1e-9).unwrap();
        assert_eq!(imgs.len(), 1);
        assert_abs_diff_eq!(imgs[0].x, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(imgs[0].y, -1.0, epsilon = 1e-12);
    }

    #[test]
    fn mirror_rejects_coincident_pair() {
        assert!(mirror_ambiguities(p(1.0, 1.0), p(1.0, 1.0), p(0.0, 0.0)).is_err());
    }

    #[test]
    fn three_lrp_line_example() {
        let lines = three_lrp_ambiguity_lines(p(0.0, 0.0), p(2.0, 0.0), p(1.0, 2.0)).unwrap();
        assert_abs_diff_eq!(lines[0].anchor.x, 1.0);
        assert_abs_diff_eq!(lines[0].anchor.y, 0.0);
        assert_abs_diff_eq!(lines[0].direction.y.abs(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(lines[0].direction.x.abs(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn equilateral_lines_parallel_to_edges() {
        let h = 3f64.sqrt();
        let (a, b, c) = (p(0.0, 0.0), p(2.0, 0.0), p(1.0, h));
        let lines = three_lrp_ambiguity_lines(a, b, c).unwrap();
        let edges = [b - a, c - a, c - b];
        for (line, edge) in lines.iter().zip(edges) {
            let e = edge.normalized().unwrap();
            assert_abs_diff_eq!(line.direction.cross(e), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn collinear_three_is_degenerate() {
        assert!(three_lrp_ambiguity_lines(p(0.0, 0.0), p(1.0, 0.0), p(3.0, 0.0)).is_err());
    }

    #[test]
    fn square_violates_condition() {
        let sq = layout(&[(0.0, 0.0), (2.0, 0.0), (0.0, 2.0), (2.0, 2.0)], &[0, 0, 0, 0]);
        assert!(!four_lrp_condition(&sq).unwrap());
    }

    #[test]
    fn perturbed_square_satisfies_condition() {
        let pl = layout(&[(0.3, 0.0), (2.0, 0.4), (0.0, 2.6), (2.5, 2.1)], &[0, 0, 0, 0]);
        assert!(four_lrp_condition(&pl).unwrap());
    }

    #[test]
    fn collinear_four_violates_condition() {
        let line = layout(&[(0.0, 1.0), (1.0, 1.0), (2.5, 1.0), (4.0, 1.0)], &[0, 0, 0, 0]);
        assert!(!four_lrp_condition(&line).unwrap());
    }

    #[test]
    fn condition_rejects_bad_counts() {
        let three = layout(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)], &[0, 0, 0]);
        assert!(four_lrp_condition(&three).is_err());
        let split = layout(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (2.0, 2.0)], &[0, 0, 0, 1]);
        assert!(four_lrp_condition(&split).is_err());
    }

    #[test]
    fn two_type_checks_only_same_type_pairs() {
        // Bisector x = 1 of the cross-type pair {0, 2} hits the midpoint of
        // {1, 3}; that partition only matters when all four share a type.
        let pts = [(0.0, 0.0), (1.0, 3.0), (2.0, 0.0), (1.0, 1.2)];
        assert!(!four_lrp_condition(&layout(&pts, &[0, 0, 0, 0])).unwrap());
        assert!(four_lrp_condition(&layout(&pts, &[0, 0, 1, 1])).unwrap());
    }

    proptest! {
        #[test]
        fn mirror_images_share_distances(
            ax in -5.0..5.0f64, ay in -5.0..5.0f64, bx in -5.0..5.0f64, by in -5.0..5.0f64,
            px in -5.0..5.0f64, py in -5.0..5.0f64,
        ) {
            let (a, b, q) = (p(ax, ay), p(bx, by), p(px, py));
            prop_assume!(a.distance(b) > 1e-3);
            let want = sorted_dists(q, &[a, b]);
            for img in mirror_ambiguities(a, b, q).unwrap() {
                let got = sorted_dists(img, &[a, b]);
                prop_assert!((got[0] - want[0]).abs() <= 1e-9 && (got[1] - want[1]).abs() <= 1e-9);
            }
        }

        #[test]
        fn ambiguity_lines_share_three_distances(
            pts in prop::array::uniform6(-5.0..5.0f64), t in 0.01..4.0f64,
        ) {
            let (a, b, c) = (p(pts[0], pts[1]), p(pts[2], pts[3]), p(pts[4], pts[5]));
            let area = (b - a).cross(c - a).abs();
            prop_assume!(area > 0.05);
            for line in three_lrp_ambiguity_lines(a, b, c).unwrap() {
                let d1 = sorted_dists(line.point_at(t), &[a, b, c]);
                let d2 = sorted_dists(line.point_at(-t), &[a, b, c]);
                for (x, y) in d1.iter().zip(&d2) {
                    prop_assert!((x - y).abs() <= 1e-9);
                }
            }
        }
    }
}
