//! Continuous improvement of a breakpoint path.
//!
//! Three passes run on the graph's best path:
//!
//! 1. shortcutting: a run of breakpoints is replaced by a straight segment
//!    whenever that segment is no longer (weighted) than the run, and the
//!    points where the new segments cross cut lines become breakpoints;
//! 2. every interior breakpoint is doubled so that a single crossing can
//!    open up into a stretch travelled along its host line;
//! 3. coordinate descent: each breakpoint slides along its host segment to
//!    the golden-section minimizer of its two adjacent weighted segments.
//!
//! Breakpoints slide along the whole cut line through them, so descent can
//! move a crossing into a neighbouring cell. The three steps repeat while
//! they still shorten the path. Every step keeps the path admissible and no
//! accepted step increases its length.

use crate::geometry::{Point, Polyline, COORD_EPS};
use crate::metric::{cut_index, Axis, ConformalMetric};
use crate::solver::golden::golden_section_iters;
use crate::solver::graph::Host;

/// Golden-section iterations per coordinate.
pub const GOLDEN_ITERATIONS: usize = 48;
const MAX_SWEEPS: usize = 400;
const MAX_PASSES: usize = 16;
const SAME_POINT: f64 = 1e-14;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Breakpoint {
    pub point: Point,
    /// False for the two endpoints. Movable breakpoints slide along every
    /// interior cut line through them.
    pub movable: bool,
}

pub(crate) fn polyline(path: &[Breakpoint]) -> Polyline {
    let mut vertices: Vec<Point> = path.iter().map(|b| b.point).collect();
    if vertices.len() == 1 {
        vertices.push(vertices[0]);
    }
    Polyline::new(vertices).expect("at least two vertices")
}

fn weighted_length(metric: &ConformalMetric, path: &[Breakpoint]) -> f64 {
    path.windows(2).map(|w| metric.segment_length(w[0].point, w[1].point)).sum()
}

fn dedup(path: &mut Vec<Breakpoint>) {
    path.dedup_by(|b, a| a.point.approx_eq(&b.point, SAME_POINT));
}

fn shortcut(metric: &ConformalMetric, path: &[Breakpoint]) -> Vec<Breakpoint> {
    let n = path.len();
    let mut prefix = vec![0.0; n];
    for k in 1..n {
        prefix[k] = prefix[k - 1] + metric.segment_length(path[k - 1].point, path[k].point);
    }
    let mut out = vec![path[0]];
    let mut i = 0;
    while i + 1 < n {
        let mut next = i + 1;
        for j in (i + 2..n).rev() {
            let run = prefix[j] - prefix[i];
            if metric.segment_length(path[i].point, path[j].point) <= run * (1.0 + 1e-15) {
                next = j;
                break;
            }
        }
        out.push(path[next]);
        i = next;
    }
    out
}

/// Breakpoints where the open segment `a → b` meets an interior cut line
/// that refracts or can carry the path: the cells on either side differ, or
/// the line itself is cheaper than both.
fn crossings(metric: &ConformalMetric, a: Point, b: Point) -> Vec<Breakpoint> {
    let part = metric.partition();
    let mut hits: Vec<(f64, Breakpoint)> = Vec::new();
    for axis in [Axis::Vertical, Axis::Horizontal] {
        let (cuts, u0, u1) = match axis {
            Axis::Vertical => (part.x_cuts(), a.x(), b.x()),
            Axis::Horizontal => (part.y_cuts(), a.y(), b.y()),
        };
        if (u1 - u0).abs() <= COORD_EPS {
            continue;
        }
        for (k, &c) in cuts.iter().enumerate().take(cuts.len() - 1).skip(1) {
            let t = (c - u0) / (u1 - u0);
            if t <= 1e-12 || t >= 1.0 - 1e-12 {
                continue;
            }
            let point = a.lerp(b, t);
            if is_active(metric, axis, k, point) {
                hits.push((t, Breakpoint { point, movable: true }));
            }
        }
    }
    hits.sort_by(|l, r| l.0.total_cmp(&r.0));
    hits.into_iter().map(|(_, b)| b).collect()
}

fn is_active(metric: &ConformalMetric, axis: Axis, k: usize, point: Point) -> bool {
    let part = metric.partition();
    let (lo, hi, line) = match axis {
        Axis::Vertical => {
            let j = part.row_of(point.y());
            (part.weight(k - 1, j), part.weight(k, j), metric.vertical_edge_weight(k, j))
        }
        Axis::Horizontal => {
            let i = part.column_of(point.x());
            (part.weight(i, k - 1), part.weight(i, k), metric.horizontal_edge_weight(k, i))
        }
    };
    lo != hi || line < lo
}

/// The whole cut line `axis = c`.
fn full_line(axis: Axis, c: f64) -> Host {
    let (s, e) = match axis {
        Axis::Vertical => ((c, 0.0), (c, 1.0)),
        Axis::Horizontal => ((0.0, c), (1.0, c)),
    };
    Host {
        start: Point::new(s.0, s.1).expect("cut coordinates lie in the unit square"),
        end: Point::new(e.0, e.1).expect("cut coordinates lie in the unit square"),
    }
}

fn reseed(metric: &ConformalMetric, path: &[Breakpoint]) -> Vec<Breakpoint> {
    let mut out = vec![path[0]];
    for w in path.windows(2) {
        out.extend(crossings(metric, w[0].point, w[1].point));
        out.push(w[1]);
    }
    out
}

fn split_breakpoints(path: &[Breakpoint]) -> Vec<Breakpoint> {
    let mut out = Vec::with_capacity(2 * path.len());
    for (k, b) in path.iter().enumerate() {
        out.push(*b);
        if k > 0 && k + 1 < path.len() && b.movable {
            out.push(*b);
        }
    }
    out
}

/// Minimize `local` over a whole cut line. The cost wiggles as the point
/// passes perpendicular cuts, so every cut crossing is tried first; golden
/// section then refines inside the two cells around the best crossing and
/// around `current`.
fn line_minimize(metric: &ConformalMetric, host: Host, current: f64, local: impl Fn(Point) -> f64) -> (f64, f64) {
    let part = metric.partition();
    let cuts = if (host.start.x() - host.end.x()).abs() <= COORD_EPS {
        part.y_cuts()
    } else {
        part.x_cuts()
    };
    let f = |t: f64| local(host.at(t));
    let mut best = (current, f(current));
    let mut best_k = cuts.partition_point(|&c| c <= current).saturating_sub(1);
    let current_k = best_k;
    for (k, &c) in cuts.iter().enumerate() {
        let v = f(c);
        if v < best.1 {
            best = (c, v);
            best_k = k;
        }
    }
    let last = cuts.len() - 1;
    let mut brackets = vec![(cuts[best_k.saturating_sub(1)], cuts[(best_k + 1).min(last)])];
    if current_k != best_k {
        brackets.push((cuts[current_k], cuts[(current_k + 1).min(last)]));
    }
    for (lo, hi) in brackets {
        let g = golden_section_iters(f, lo, hi, GOLDEN_ITERATIONS);
        if g.1 < best.1 {
            best = g;
        }
    }
    best
}

/// Interior cut lines through `p`, with the parameter of `p` on each.
fn lines_through(metric: &ConformalMetric, p: Point) -> impl Iterator<Item = (Host, f64)> {
    let part = metric.partition();
    let interior = |cuts: &[f64], v: f64| cut_index(cuts, v).is_some_and(|k| k > 0 && k + 1 < cuts.len());
    let vertical = interior(part.x_cuts(), p.x()).then(|| (full_line(Axis::Vertical, p.x()), p.y()));
    let horizontal = interior(part.y_cuts(), p.y()).then(|| (full_line(Axis::Horizontal, p.y()), p.x()));
    vertical.into_iter().chain(horizontal)
}

/// Best position for a breakpoint between fixed neighbours `prev` and `next`.
fn best_move(metric: &ConformalMetric, prev: Point, at: Point, next: Point) -> Option<(Point, f64)> {
    let local = |x: Point| metric.segment_length(prev, x) + metric.segment_length(x, next);
    let current = local(at);
    let mut best: Option<(Point, f64)> = None;
    for (host, t0) in lines_through(metric, at) {
        let (t, value) = line_minimize(metric, host, t0, local);
        if value < best.map_or(current, |b| b.1) {
            best = Some((host.at(t), value));
        }
    }
    best.map(|(x, value)| (x, current - value))
}

/// One sweep of coordinate descent; returns the total improvement.
fn sweep(metric: &ConformalMetric, path: &mut [Breakpoint]) -> f64 {
    let mut improvement = 0.0;
    // Coincident doubled breakpoints first move together, otherwise the
    // pair is stuck on the kink where the run between them has length zero.
    for k in 1..path.len().saturating_sub(2) {
        if !(path[k].movable && path[k + 1].movable) || !path[k].point.approx_eq(&path[k + 1].point, SAME_POINT) {
            continue;
        }
        if let Some((x, gain)) = best_move(metric, path[k - 1].point, path[k].point, path[k + 2].point) {
            path[k].point = x;
            path[k + 1].point = x;
            improvement += gain;
        }
    }
    for k in 1..path.len().saturating_sub(1) {
        if !path[k].movable {
            continue;
        }
        if let Some((x, gain)) = best_move(metric, path[k - 1].point, path[k].point, path[k + 1].point) {
            path[k].point = x;
            improvement += gain;
        }
    }
    improvement
}

/// Improve `path`. Each pass shortcuts, reseeds crossings, doubles
/// breakpoints and runs descent sweeps until a sweep gains less than
/// `stop_fraction` of the length; passes repeat while they still gain.
/// Coordinate descent alone, keeping every breakpoint. Used on hand-built
/// candidates that only beat the straight segment once their breakpoints
/// have moved.
pub(crate) fn relax(metric: &ConformalMetric, mut path: Vec<Breakpoint>, stop_fraction: f64) -> Vec<Breakpoint> {
    let length = weighted_length(metric, &path);
    for _ in 0..MAX_SWEEPS {
        if sweep(metric, &mut path) <= stop_fraction * length.max(1e-9) {
            break;
        }
    }
    path
}

pub(crate) fn smooth(metric: &ConformalMetric, path: Vec<Breakpoint>, stop_fraction: f64) -> Vec<Breakpoint> {
    let mut path = path;
    dedup(&mut path);
    if path.len() < 2 {
        return path;
    }
    let mut length = weighted_length(metric, &path);
    for _ in 0..MAX_PASSES {
        let mut next = split_breakpoints(&reseed(metric, &shortcut(metric, &path)));
        for _ in 0..MAX_SWEEPS {
            let gained = sweep(metric, &mut next);
            if gained <= stop_fraction * length.max(1e-9) {
                break;
            }
        }
        dedup(&mut next);
        let next = shortcut(metric, &next);
        let next_length = weighted_length(metric, &next);
        if next_length >= length {
            break;
        }
        let gained = length - next_length;
        path = next;
        length = next_length;
        if gained <= stop_fraction * length.max(1e-9) {
            break;
        }
    }
    path
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: f64, y: f64) -> Point {
        Point::new(x, y).unwrap()
    }

    #[test]
    fn sliding_refracts_across_interface() {
        // Left half weight 1, right half weight 2: Snell's law for the crossing.
        let m = ConformalMetric::from_grid(vec![0.0, 0.5, 1.0], vec![0.0, 1.0], vec![vec![1.0, 2.0]], vec![]).unwrap();
        let path = vec![
            Breakpoint { point: pt(0.0, 0.0), movable: false },
            Breakpoint { point: pt(0.5, 0.5), movable: true },
            Breakpoint { point: pt(1.0, 1.0), movable: false },
        ];
        let out = smooth(&m, path, 1e-12);
        let y = out[1].point.y();
        // sin θ1 / sin θ2 = w2 / w1
        let s1 = y / (0.25 + y * y).sqrt();
        let s2 = (1.0 - y) / (0.25 + (1.0 - y).powi(2)).sqrt();
        assert!((s1 / s2 - 2.0).abs() < 1e-6, "ratio {}", s1 / s2);
    }

    #[test]
    fn doubled_breakpoint_opens_along_cheap_line() {
        // Half-cost line x = 1/2: a single crossing should split into a run.
        let m = ConformalMetric::from_grid(
            vec![0.0, 1.0],
            vec![0.0, 1.0],
            vec![vec![1.0]],
            vec![crate::metric::LineFeature::vertical(0.5, 0.5)],
        )
        .unwrap();
        let path = vec![
            Breakpoint { point: pt(0.45, 0.0), movable: false },
            Breakpoint { point: pt(0.5, 0.5), movable: true },
            Breakpoint { point: pt(0.55, 1.0), movable: false },
        ];
        let out = smooth(&m, path, 1e-12);
        let value = weighted_length(&m, &out);
        let exact = 0.5 + 0.05 * 3f64.sqrt();
        assert!((value - exact).abs() < 1e-8, "{value} vs {exact}");
    }

    #[test]
    fn shortcut_straightens_uniform_zigzag() {
        let m = ConformalMetric::unit();
        let path: Vec<Breakpoint> = [(0.0, 0.0), (0.1, 0.3), (0.2, 0.1), (1.0, 1.0)]
            .iter()
            .map(|&(x, y)| Breakpoint { point: pt(x, y), movable: false })
            .collect();
        let out = shortcut(&m, &path);
        assert_eq!(out.len(), 2);
    }
}
