use thiserror::Error;

/// Errors raised while constructing or evaluating metrics and points.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("point ({x}, {y}) lies outside the unit square")]
    OutOfDomain { x: f64, y: f64 },
    #[error("polyline needs at least two vertices, got {0}")]
    ShortPolyline(usize),
    #[error("invalid partition: {0}")]
    Partition(String),
    #[error("invalid line feature: {0}")]
    Feature(String),
    #[error("pseudometric flag is {declared} but feature weights imply {derived}")]
    PseudometricFlag { declared: bool, derived: bool },
    #[error("metric document: {0}")]
    Document(String),
}

/// Errors raised by the geodesic solver.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("invalid solver configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// Errors raised by the family constructors and registry.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FamilyError {
    #[error("unknown family id `{0}`")]
    UnknownFamily(String),
    #[error("index {index} outside supported range {min}..={max} for `{family}`")]
    IndexOutOfRange {
        family: String,
        index: u32,
        min: u32,
        max: u32,
    },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// Errors raised by the convergence laboratory.
#[derive(Debug, Error)]
pub enum LabError {
    #[error("pair sample is empty")]
    EmptySample,
    #[error("rate fit needs at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("rate fit needs positive gaps; index {index} has gap {gap} (exact convergence?)")]
    NonPositiveGap { index: u32, gap: f64 },
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
