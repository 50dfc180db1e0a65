use rayon::prelude::*;
use serde::Serialize;

use super::{Direction, DistanceFunction, PairSample};
use crate::error::LabError;
use crate::geometry::Point;

/// Slack multiplier on the solver tolerance in squeeze checks.
pub const SQUEEZE_SLACK_FACTOR: f64 = 3.0;

/// Both distances at one sampled pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairEval {
    pub pair_id: usize,
    pub p: Point,
    pub q: Point,
    pub d_metric: f64,
    pub d_base: f64,
}

impl PairEval {
    pub fn gap(&self) -> f64 {
        (self.d_metric - self.d_base).abs()
    }
}

/// Evaluate both functions on every pair, in parallel; output is in pair order.
pub fn evaluate_pairs<A, B>(d_a: &A, d_b: &B, sample: &PairSample) -> Result<Vec<PairEval>, LabError>
where
    A: DistanceFunction + ?Sized,
    B: DistanceFunction + ?Sized,
{
    if sample.is_empty() {
        return Err(LabError::EmptySample);
    }
    Ok(sample
        .pairs()
        .par_iter()
        .enumerate()
        .map(|(pair_id, &(p, q))| PairEval {
            pair_id,
            p,
            q,
            d_metric: d_a.distance(p, q),
            d_base: d_b.distance(p, q),
        })
        .collect())
}

/// `max |d_A − d_B|` over the sample.
pub fn sup_norm_estimate<A, B>(d_a: &A, d_b: &B, sample: &PairSample) -> Result<f64, LabError>
where
    A: DistanceFunction + ?Sized,
    B: DistanceFunction + ?Sized,
{
    Ok(evaluate_pairs(d_a, d_b, sample)?.iter().map(PairEval::gap).fold(0.0, f64::max))
}

/// Whether `d0 − C(n) − s ≤ d_n ≤ d0 + C(n) + s` holds on every pair for every
/// index, with `s = 3·solver_tolerance·max(d0, 1)`.
pub fn squeeze_check<D, B>(
    d_seq: impl Fn(u32) -> Result<D, LabError>,
    d0: &B,
    rate: impl Fn(u32) -> f64,
    sample: &PairSample,
    indices: &[u32],
    solver_tolerance: f64,
) -> Result<bool, LabError>
where
    D: DistanceFunction,
    B: DistanceFunction + ?Sized,
{
    for &n in indices {
        let d_n = d_seq(n)?;
        let c = rate(n);
        let ok = evaluate_pairs(&d_n, d0, sample)?.iter().all(|e| {
            let slack = SQUEEZE_SLACK_FACTOR * solver_tolerance * e.d_base.max(1.0);
            e.d_metric >= e.d_base - c - slack && e.d_metric <= e.d_base + c + slack
        });
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Outcome of checking `d_A ≥ scale·d_B − offset` or `d_A ≤ scale·d_B + offset`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComparisonReport {
    /// `max |d_A − d_B|` over the sample.
    pub sup_gap: f64,
    /// Pair with the smallest margin.
    pub worst_pair: (Point, Point),
    /// `margin < −tolerance_slack`.
    pub violated: bool,
    /// Smallest slack in the inequality; negative means it fails.
    pub margin: f64,
}

#[allow(clippy::too_many_arguments)]
pub fn verify_comparison<A, B>(
    d_a: &A,
    d_b: &B,
    scale: f64,
    offset: f64,
    direction: Direction,
    sample: &PairSample,
    tolerance_slack: f64,
) -> Result<ComparisonReport, LabError>
where
    A: DistanceFunction + ?Sized,
    B: DistanceFunction + ?Sized,
{
    if !(scale > 0.0 && offset >= 0.0) {
        return Err(LabError::Argument(format!(
            "need scale > 0 and offset >= 0, got scale {scale}, offset {offset}"
        )));
    }
    let evals = evaluate_pairs(d_a, d_b, sample)?;
    let margin_of = |e: &PairEval| match direction {
        Direction::Lower => e.d_metric - (scale * e.d_base - offset),
        Direction::Upper => scale * e.d_base + offset - e.d_metric,
    };
    let mut worst = &evals[0];
    let mut margin = margin_of(worst);
    for e in &evals[1..] {
        let m = margin_of(e);
        if m < margin {
            margin = m;
            worst = e;
        }
    }
    Ok(ComparisonReport {
        sup_gap: evals.iter().map(PairEval::gap).fold(0.0, f64::max),
        worst_pair: (worst.p, worst.q),
        violated: margin < -tolerance_slack,
        margin,
    })
}

/// First candidate on which `c·d_base` bounds `d_metric` from the wrong
/// side: `c·d_base > d_metric` for a lower bound, `c·d_base < d_metric` for
/// an upper bound.
pub fn lipschitz_witness_search<A, B>(
    d_metric: &A,
    d_base: &B,
    c: f64,
    direction: Direction,
    candidates: &PairSample,
) -> Result<Option<PairEval>, LabError>
where
    A: DistanceFunction + ?Sized,
    B: DistanceFunction + ?Sized,
{
    if !(c.is_finite() && c > 0.0) {
        return Err(LabError::Argument(format!("c must be positive, got {c}")));
    }
    Ok(candidates
        .pairs()
        .par_iter()
        .enumerate()
        .map(|(pair_id, &(p, q))| PairEval {
            pair_id,
            p,
            q,
            d_metric: d_metric.distance(p, q),
            d_base: d_base.distance(p, q),
        })
        .find_first(|e| match direction {
            Direction::Lower => c * e.d_base > e.d_metric,
            Direction::Upper => c * e.d_base < e.d_metric,
        }))
}
