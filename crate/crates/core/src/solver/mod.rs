//! Geodesic distance `d_f(p, q) = inf_γ L_f(γ)` for piecewise-constant factors.
//!
//! [`distance`] runs Dijkstra on a [`BreakpointGraph`] with `K, 2K, 4K, …`
//! samples per boundary segment, optionally polishing each round's path with
//! continuous breakpoint descent, and stops once two consecutive rounds agree
//! to the configured relative tolerance. Every returned value is the exact
//! weighted length of the returned polyline, hence an upper bound on `d_f`.

pub mod golden;
pub mod graph;
pub mod oracle;
mod smooth;

use serde::{Deserialize, Serialize};

use crate::error::SolverError;
use crate::geometry::{euclid_dist, Point, Polyline};
use crate::metric::{Axis, ConformalMetric, LineFeature};

pub use graph::{BreakpointGraph, GraphNode, Host};
pub use oracle::{analytic_halfline_distance, analytic_quotient_distance};

use smooth::Breakpoint;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// Initial number of samples per boundary segment (`K`).
    pub samples_per_edge: usize,
    /// Relative change between rounds below which refinement stops.
    pub tolerance: f64,
    pub max_rounds: usize,
    /// Enable continuous breakpoint descent after each graph search.
    pub smoothing: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            samples_per_edge: 8,
            tolerance: 1e-4,
            max_rounds: 7,
            smoothing: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        if self.samples_per_edge < 2 {
            return Err(SolverError::Config(format!(
                "samples_per_edge must be at least 2, got {}",
                self.samples_per_edge
            )));
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(SolverError::Config(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if self.max_rounds == 0 || self.max_rounds > 16 {
            return Err(SolverError::Config(format!(
                "max_rounds must be in 1..=16, got {}",
                self.max_rounds
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceResult {
    pub value: f64,
    /// Change between the last two rounds. After a single round this is
    /// `value - w_min·d(p,q)`, which bounds the error from above.
    pub gap: f64,
    pub rounds_used: usize,
    pub path: Polyline,
    /// Best value after each round (non-increasing).
    #[serde(skip)]
    pub history: Vec<f64>,
}

/// Distance between `p` and `q` under `metric`.
pub fn distance(
    metric: &ConformalMetric,
    p: Point,
    q: Point,
    cfg: &SolverConfig,
) -> Result<DistanceResult, SolverError> {
    cfg.validate()?;
    if p == q {
        return Ok(DistanceResult {
            value: 0.0,
            gap: 0.0,
            rounds_used: 1,
            path: Polyline::segment(p, q),
            history: vec![0.0],
        });
    }

    let stop_fraction = cfg.tolerance / 10.0;
    let mut best_path = Polyline::segment(p, q);
    let mut best = metric.path_length(&best_path);
    for mut seed in detour_seeds(metric, p, q) {
        if cfg.smoothing {
            seed = smooth::smooth(metric, smooth::relax(metric, seed, stop_fraction), stop_fraction);
        }
        let candidate = smooth::polyline(&seed);
        let value = metric.path_length(&candidate);
        if value < best {
            best = value;
            best_path = candidate;
        }
    }
    let mut history: Vec<f64> = Vec::with_capacity(cfg.max_rounds);
    let mut gap = f64::INFINITY;

    for round in 0..cfg.max_rounds {
        let k = cfg.samples_per_edge << round;
        let graph = BreakpointGraph::build(metric, p, q, k)?;
        let (_, nodes) = graph.shortest_path();
        let mut path: Vec<Breakpoint> = nodes
            .iter()
            .map(|&i| {
                let node = graph.nodes()[i];
                Breakpoint {
                    point: node.point,
                    movable: node.host.is_some(),
                }
            })
            .collect();
        if cfg.smoothing {
            path = smooth::smooth(metric, path, stop_fraction);
        }
        let candidate = smooth::polyline(&path);
        let value = metric.path_length(&candidate);
        if value < best {
            best = value;
            best_path = candidate;
        }
        if let Some(&last) = history.last() {
            debug_assert!(best <= last + 1e-12, "refinement increased the distance");
            gap = last - best;
        } else {
            gap = (best - metric.w_min() * euclid_dist(p, q)).max(0.0);
        }
        history.push(best);
        if round > 0 && gap <= cfg.tolerance * best.max(1e-9) {
            break;
        }
    }

    Ok(DistanceResult {
        value: best,
        gap,
        rounds_used: history.len(),
        path: best_path,
        history,
    })
}

/// Paths that walk to a cheap feature line, follow it, and walk off again.
/// A coarse graph samples such lines too sparsely to find these detours when
/// both endpoints sit close to the line.
fn detour_seeds(metric: &ConformalMetric, p: Point, q: Point) -> Vec<Vec<Breakpoint>> {
    let foot = |f: &LineFeature, a: Point| {
        let [lo, hi] = f.span;
        match f.axis {
            Axis::Vertical => Point::new(f.position, a.y().clamp(lo, hi)),
            Axis::Horizontal => Point::new(a.x().clamp(lo, hi), f.position),
        }
        .expect("feature lies in the unit square")
    };
    let fixed = |point| Breakpoint { point, movable: false };
    let movable = |point| Breakpoint { point, movable: true };
    metric
        .features()
        .iter()
        .filter(|f| f.weight < metric.w_max())
        .map(|f| vec![fixed(p), movable(foot(f, p)), movable(foot(f, q)), fixed(q)])
        .collect()
}

/// Convenience wrapper binding a metric to a solver configuration.
#[derive(Debug, Clone)]
pub struct Geodesic {
    metric: ConformalMetric,
    config: SolverConfig,
}

impl Geodesic {
    pub fn new(metric: ConformalMetric, config: SolverConfig) -> Result<Self, SolverError> {
        config.validate()?;
        Ok(Geodesic { metric, config })
    }

    pub fn metric(&self) -> &ConformalMetric {
        &self.metric
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn solve(&self, p: Point, q: Point) -> DistanceResult {
        distance(&self.metric, p, q, &self.config).expect("configuration validated at construction")
    }

    pub fn distance(&self, p: Point, q: Point) -> f64 {
        self.solve(p, q).value
    }
}
