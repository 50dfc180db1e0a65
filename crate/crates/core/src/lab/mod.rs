//! Comparison of distance functions over sampled point pairs.
//!
//! Sup-norms are estimated on finite samples, so every reported value is a
//! lower bound on the true supremum over `[0,1]² × [0,1]²`.

mod compare;
mod experiment;
mod rate;
mod report;
mod sample;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::LabError;
use crate::families::LimitKind;
use crate::geometry::{euclid_dist, Point};
use crate::solver::{analytic_halfline_distance, analytic_quotient_distance, Geodesic};

pub use compare::{
    evaluate_pairs, lipschitz_witness_search, squeeze_check, sup_norm_estimate, verify_comparison,
    ComparisonReport, PairEval, SQUEEZE_SLACK_FACTOR,
};
pub use experiment::{run_convergence, ConvergenceRun, Experiment, SampleSpec, WitnessRecord};
pub use rate::{rate_fit, RateFit};
pub use report::{format_sig, write_csv, CsvRow, Summary};
pub use sample::{PairSample, SampleStrategy};

/// Side of a Lipschitz-type inequality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// `d_A ≥ c·d_B − offset`
    Lower,
    /// `d_A ≤ c·d_B + offset`
    Upper,
}

impl FromStr for Direction {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lower" => Ok(Direction::Lower),
            "upper" => Ok(Direction::Upper),
            other => Err(LabError::Argument(format!("unknown direction `{other}`"))),
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Lower => "lower",
            Direction::Upper => "upper",
        })
    }
}

/// A distance function on the unit square.
pub trait DistanceFunction: Sync {
    fn distance(&self, p: Point, q: Point) -> f64;
}

impl<F: Fn(Point, Point) -> f64 + Sync> DistanceFunction for F {
    fn distance(&self, p: Point, q: Point) -> f64 {
        self(p, q)
    }
}

impl DistanceFunction for Geodesic {
    fn distance(&self, p: Point, q: Point) -> f64 {
        Geodesic::distance(self, p, q)
    }
}

/// Closed-form distance of a limit metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnalyticLimit(pub LimitKind);

impl DistanceFunction for AnalyticLimit {
    fn distance(&self, p: Point, q: Point) -> f64 {
        match self.0 {
            LimitKind::Euclidean => euclid_dist(p, q),
            LimitKind::Quotient => analytic_quotient_distance(p, q),
            LimitKind::Halfline => analytic_halfline_distance(p, q),
        }
    }
}
