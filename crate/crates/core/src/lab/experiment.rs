use serde::{Deserialize, Serialize};

use super::{
    evaluate_pairs, lipschitz_witness_search, rate_fit, AnalyticLimit, CsvRow, Direction, PairSample, Summary,
};
use crate::error::LabError;
use crate::families::{LimitKind, MetricFamily};
use crate::geometry::Point;
use crate::solver::{Geodesic, SolverConfig};

/// How to draw the pairs for one family member.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "strategy")]
pub enum SampleSpec {
    UniformGrid { side: usize },
    Random { count: usize, seed: u64 },
    FeatureAdjacent { count: usize, seed: u64 },
    PaperWitnesses,
    Mixed { parts: Vec<SampleSpec> },
}

impl SampleSpec {
    pub fn build(&self, family: &MetricFamily, index: u32) -> Result<PairSample, LabError> {
        match self {
            SampleSpec::UniformGrid { side } => PairSample::uniform_grid(*side),
            SampleSpec::Random { count, seed } => PairSample::random(*count, *seed),
            SampleSpec::FeatureAdjacent { count, seed } => {
                let metric = family.build_with(index, true)?;
                PairSample::feature_adjacent(&metric, family.feature_scale(index), *count, *seed)
            }
            SampleSpec::PaperWitnesses => PairSample::paper_witnesses(family, index),
            SampleSpec::Mixed { parts } => {
                let built = parts.iter().map(|p| p.build(family, index)).collect::<Result<Vec<_>, _>>()?;
                PairSample::mixed(built)
            }
        }
    }
}

/// A convergence run: one family against a base distance over several indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub family: MetricFamily,
    pub indices: Vec<u32>,
    /// Defaults to the family's limit, or Euclidean if it has none.
    pub base: Option<LimitKind>,
    pub sample: SampleSpec,
    pub solver: SolverConfig,
    /// Allow indices beyond the desk-scale caps.
    pub force: bool,
}

/// A Lipschitz-failure pair found at one index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WitnessRecord {
    pub index: u32,
    pub p: Point,
    pub q: Point,
    pub direction: Direction,
    pub c: f64,
    pub d_metric: f64,
    pub d_base: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRun {
    pub rows: Vec<CsvRow>,
    pub summary: Summary,
}

pub fn run_convergence(exp: &Experiment) -> Result<ConvergenceRun, LabError> {
    if exp.indices.is_empty() {
        return Err(LabError::Argument("no indices given".into()));
    }
    let base = AnalyticLimit(exp.base.unwrap_or_else(|| exp.family.base()));
    let euclid = AnalyticLimit(LimitKind::Euclidean);
    let name = exp.family.name().to_string();
    let mut rows = Vec::new();
    let mut sup_gaps = Vec::with_capacity(exp.indices.len());
    let mut witnesses = Vec::new();
    for &index in &exp.indices {
        let geodesic = Geodesic::new(exp.family.build_with(index, exp.force)?, exp.solver)?;
        let sample = exp.sample.build(&exp.family, index)?;
        let evals = evaluate_pairs(&geodesic, &base, &sample)?;
        sup_gaps.push(evals.iter().map(|e| e.gap()).fold(0.0, f64::max));
        rows.extend(evals.iter().map(|e| CsvRow {
            family: name.clone(),
            index,
            pair_id: e.pair_id,
            px: e.p.x(),
            py: e.p.y(),
            qx: e.q.x(),
            qy: e.q.y(),
            d_metric: e.d_metric,
            d_base: e.d_base,
            gap: e.gap(),
        }));
        if let Some((direction, c)) = exp.family.lipschitz_failure(index) {
            let candidates = PairSample::paper_witnesses(&exp.family, index)?;
            if let Some(hit) = lipschitz_witness_search(&geodesic, &euclid, c, direction, &candidates)? {
                witnesses.push(WitnessRecord {
                    index,
                    p: hit.p,
                    q: hit.q,
                    direction,
                    c,
                    d_metric: hit.d_metric,
                    d_base: hit.d_base,
                });
            }
        }
    }
    let points: Vec<(u32, f64)> = exp.indices.iter().copied().zip(sup_gaps.iter().copied()).collect();
    let fitted_rate = rate_fit(&points).ok();
    Ok(ConvergenceRun {
        rows,
        summary: Summary {
            family: name,
            indices: exp.indices.clone(),
            sup_gaps,
            fitted_rate,
            witnesses,
        },
    })
}
