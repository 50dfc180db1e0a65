//! Closed-form distances of the two limit metrics with a weighted midline.

use crate::geometry::{euclid_dist, Point};
use crate::solver::golden::golden_section_tol;

/// Absolute tolerance of the nested golden-section search in
/// [`analytic_halfline_distance`].
pub const HALFLINE_TOL: f64 = 1e-10;

/// Distance when the midline `x = 1/2` is collapsed to a point:
/// `min(|x_p - 1/2| + |x_q - 1/2|, d(p, q))`.
pub fn analytic_quotient_distance(p: Point, q: Point) -> f64 {
    let via_line = (p.x() - 0.5).abs() + (q.x() - 0.5).abs();
    via_line.min(euclid_dist(p, q))
}

/// Distance when travel along the midline costs half:
/// `min(d(p,q), min_{a,b} d(p,(1/2,a)) + |a-b|/2 + d((1/2,b),q))`.
///
/// The two-variable objective is jointly convex, so nested golden-section
/// searches (outer over `a`, inner over `b`) find its minimum.
pub fn analytic_halfline_distance(p: Point, q: Point) -> f64 {
    let (dxp, dxq) = (p.x() - 0.5, q.x() - 0.5);
    let leg = |dx: f64, dy: f64| dx.hypot(dy);
    let inner = |a: f64| {
        let head = leg(dxp, p.y() - a);
        golden_section_tol(|b| head + 0.5 * (a - b).abs() + leg(dxq, q.y() - b), 0.0, 1.0, HALFLINE_TOL).1
    };
    let (_, via_line) = golden_section_tol(inner, 0.0, 1.0, HALFLINE_TOL);
    via_line.min(euclid_dist(p, q))
}
