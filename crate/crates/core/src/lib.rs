//! Geodesic distances for piecewise-constant conformal metrics on the unit square.
//!
//! A [`ConformalMetric`] assigns a positive weight to each cell of a
//! rectangular partition of `[0,1]²`, plus optional weights on axis-aligned
//! line features. [`distance`] approximates the induced length distance
//! `inf_γ ∫ f |γ'|` over polylines. The [`families`] module builds indexed
//! metric sequences and [`lab`] compares their distance functions.

pub mod error;
pub mod families;
pub mod geometry;
pub mod lab;
pub mod metric;
pub mod solver;

pub use error::{FamilyError, LabError, MetricError, SolverError};
pub use families::{FamilyId, LimitKind, MetricFamily, Regime, Witness};
pub use geometry::{euclid_dist, Point, Polyline};
pub use metric::{pointwise_leq, Axis, ConformalMetric, LineFeature, MetricDocument, RectPartition};
pub use solver::{
    analytic_halfline_distance, analytic_quotient_distance, distance, BreakpointGraph,
    DistanceResult, Geodesic, SolverConfig,
};
pub use lab::{ComparisonReport, Direction, DistanceFunction, PairSample, SampleStrategy};
