//! Benchmark fixtures for the geodesic solver.

use rough_metric::{ConformalMetric, FamilyId, MetricFamily, PairSample, Point};

/// A named family member used across the benchmarks.
pub struct Fixture {
    pub name: String,
    pub metric: ConformalMetric,
}

/// Members of increasing size: shortcut squares and dyadic strips.
pub fn fixtures() -> Vec<Fixture> {
    let mut out = Vec::new();
    for (id, indices) in [
        (FamilyId::ShortcutSquare, &[4u32, 16, 64][..]),
        (FamilyId::DyadicMiddle, &[3, 6][..]),
        (FamilyId::DyadicExtreme, &[6][..]),
    ] {
        let family = MetricFamily::new(id, 1.0).expect("family with alpha 1");
        for &index in indices {
            out.push(Fixture {
                name: format!("{id}/{index}"),
                metric: family.build(index).expect("index within caps"),
            });
        }
    }
    out
}

/// Fixed random pairs so every run measures the same queries.
pub fn pairs(count: usize) -> Vec<(Point, Point)> {
    PairSample::random(count, 0xbe9c).expect("nonzero count").pairs().to_vec()
}
