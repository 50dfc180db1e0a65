//! Points and polylines in the closed unit square.

use serde::{Deserialize, Serialize};

use crate::error::MetricError;

/// Absolute tolerance for coordinate comparisons.
pub const COORD_EPS: f64 = 1e-12;

/// A point of `[0,1]²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    x: f64,
    y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Result<Self, MetricError> {
        let inside = |v: f64| (0.0..=1.0).contains(&v);
        if inside(x) && inside(y) {
            Ok(Point { x, y })
        } else {
            Err(MetricError::OutOfDomain { x, y })
        }
    }

    #[inline]
    pub fn x(&self) -> f64 {
        self.x
    }

    #[inline]
    pub fn y(&self) -> f64 {
        self.y
    }

    /// Affine combination `self + t (other - self)` for `t ∈ [0,1]`; stays in the square.
    pub(crate) fn lerp(self, other: Point, t: f64) -> Point {
        Point {
            x: (self.x + t * (other.x - self.x)).clamp(0.0, 1.0),
            y: (self.y + t * (other.y - self.y)).clamp(0.0, 1.0),
        }
    }

    pub(crate) fn approx_eq(&self, other: &Point, eps: f64) -> bool {
        (self.x - other.x).abs() <= eps && (self.y - other.y).abs() <= eps
    }
}

impl TryFrom<[f64; 2]> for Point {
    type Error = MetricError;

    fn try_from(v: [f64; 2]) -> Result<Self, Self::Error> {
        Point::new(v[0], v[1])
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

/// Euclidean distance `d = d_1`.
#[inline]
pub fn euclid_dist(p: Point, q: Point) -> f64 {
    (p.x - q.x).hypot(p.y - q.y)
}

/// A finite piecewise-linear curve. Consecutive vertices may coincide.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Point>", into = "Vec<Point>")]
pub struct Polyline {
    vertices: Vec<Point>,
}

impl Polyline {
    pub fn new(vertices: Vec<Point>) -> Result<Self, MetricError> {
        if vertices.len() < 2 {
            return Err(MetricError::ShortPolyline(vertices.len()));
        }
        Ok(Polyline { vertices })
    }

    pub fn segment(p: Point, q: Point) -> Self {
        Polyline {
            vertices: vec![p, q],
        }
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn segments(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        self.vertices.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn euclid_length(&self) -> f64 {
        self.segments().map(|(a, b)| euclid_dist(a, b)).sum()
    }

    /// Concatenation `self * other`; `other` must start where `self` ends.
    pub fn concat(&self, other: &Polyline) -> Polyline {
        let mut vertices = self.vertices.clone();
        vertices.extend_from_slice(&other.vertices[1..]);
        Polyline { vertices }
    }

    pub fn reversed(&self) -> Polyline {
        let mut vertices = self.vertices.clone();
        vertices.reverse();
        Polyline { vertices }
    }
}

impl TryFrom<Vec<Point>> for Polyline {
    type Error = MetricError;

    fn try_from(v: Vec<Point>) -> Result<Self, Self::Error> {
        Polyline::new(v)
    }
}

impl From<Polyline> for Vec<Point> {
    fn from(p: Polyline) -> Self {
        p.vertices
    }
}
