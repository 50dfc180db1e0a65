use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::LabError;
use crate::families::MetricFamily;
use crate::geometry::Point;
use crate::metric::{Axis, ConformalMetric};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleStrategy {
    UniformGrid,
    Random,
    FeatureAdjacent,
    PaperWitnesses,
    /// Concatenation of several samples.
    Mixed,
}

/// Point pairs over which distance functions are compared.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairSample {
    pairs: Vec<(Point, Point)>,
    strategy: SampleStrategy,
    seed: Option<u64>,
}

fn pt(x: f64, y: f64) -> Point {
    Point::new(x.clamp(0.0, 1.0), y.clamp(0.0, 1.0)).expect("clamped into the unit square")
}

impl PairSample {
    pub fn from_pairs(pairs: Vec<(Point, Point)>, strategy: SampleStrategy) -> Result<Self, LabError> {
        if pairs.is_empty() {
            return Err(LabError::EmptySample);
        }
        Ok(PairSample { pairs, strategy, seed: None })
    }

    /// All unordered pairs of distinct points of the `m × m` grid `i/(m-1)`.
    pub fn uniform_grid(m: usize) -> Result<Self, LabError> {
        if m < 2 {
            return Err(LabError::Argument(format!("grid side must be at least 2, got {m}")));
        }
        let step = 1.0 / (m - 1) as f64;
        let points: Vec<Point> = (0..m)
            .flat_map(|j| (0..m).map(move |i| pt(i as f64 * step, j as f64 * step)))
            .collect();
        let mut pairs = Vec::with_capacity(points.len() * (points.len() - 1) / 2);
        for (a, &p) in points.iter().enumerate() {
            for &q in &points[a + 1..] {
                pairs.push((p, q));
            }
        }
        PairSample::from_pairs(pairs, SampleStrategy::UniformGrid)
    }

    /// `count` pairs of independent uniform points.
    pub fn random(count: usize, seed: u64) -> Result<Self, LabError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = || pt(rng.gen(), rng.gen());
        let pairs = (0..count).map(|_| (draw(), draw())).collect();
        let mut s = PairSample::from_pairs(pairs, SampleStrategy::Random)?;
        s.seed = Some(seed);
        Ok(s)
    }

    /// `count` pairs whose points each lie within `2·delta` of an interior
    /// cut line or line feature of `metric`.
    pub fn feature_adjacent(metric: &ConformalMetric, delta: f64, count: usize, seed: u64) -> Result<Self, LabError> {
        if !(delta.is_finite() && delta > 0.0) {
            return Err(LabError::Argument(format!("delta must be positive, got {delta}")));
        }
        let part = metric.partition();
        let interior = |cuts: &[f64]| cuts[1..cuts.len() - 1].to_vec();
        let mut lines: Vec<(Axis, f64, [f64; 2])> = Vec::new();
        lines.extend(interior(part.x_cuts()).into_iter().map(|c| (Axis::Vertical, c, [0.0, 1.0])));
        lines.extend(interior(part.y_cuts()).into_iter().map(|c| (Axis::Horizontal, c, [0.0, 1.0])));
        lines.extend(metric.features().iter().map(|f| (f.axis, f.position, f.span)));
        if lines.is_empty() {
            return Err(LabError::Argument("metric has no interior lines to sample near".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = || {
            let (axis, c, span) = lines[rng.gen_range(0..lines.len())];
            let along = rng.gen_range(span[0]..=span[1]);
            let off = c + rng.gen_range(-2.0 * delta..=2.0 * delta);
            match axis {
                Axis::Vertical => pt(off, along),
                Axis::Horizontal => pt(along, off),
            }
        };
        let pairs = (0..count).map(|_| (draw(), draw())).collect();
        let mut s = PairSample::from_pairs(pairs, SampleStrategy::FeatureAdjacent)?;
        s.seed = Some(seed);
        Ok(s)
    }

    /// The closed-form witness pairs of `family` at `index`.
    pub fn paper_witnesses(family: &MetricFamily, index: u32) -> Result<Self, LabError> {
        let pairs = family.witnesses(index).into_iter().map(|w| (w.p, w.q)).collect();
        PairSample::from_pairs(pairs, SampleStrategy::PaperWitnesses)
    }

    pub fn mixed(parts: Vec<PairSample>) -> Result<Self, LabError> {
        let seed = parts.iter().find_map(|p| p.seed);
        let pairs = parts.into_iter().flat_map(|p| p.pairs).collect();
        let mut s = PairSample::from_pairs(pairs, SampleStrategy::Mixed)?;
        s.seed = seed;
        Ok(s)
    }

    /// Append pairs; the strategy becomes [`SampleStrategy::Mixed`].
    pub fn extend(&mut self, other: &PairSample) {
        self.pairs.extend_from_slice(&other.pairs);
        self.strategy = SampleStrategy::Mixed;
    }

    pub fn pairs(&self) -> &[(Point, Point)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn strategy(&self) -> SampleStrategy {
        self.strategy
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }
}
