//! Command-line flags and the optional TOML config file they override.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use rough_metric::{Point, SolverConfig};

use crate::UsageError;

#[derive(Debug, Parser)]
#[command(name = "rough-metric", version, about = "Geodesic distances of piecewise-constant conformal metrics")]
pub struct Cli {
    /// TOML file supplying defaults for any flag; command-line flags win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Distance between two points under one metric, printed as JSON.
    Distance(DistanceArgs),
    /// Sup-norm gaps of a family against its limit over several indices.
    Converge(ConvergeArgs),
    /// Search for a pair breaking a Lipschitz bound against the Euclidean distance.
    Witness(WitnessArgs),
    /// Print or write the metric JSON of one family member.
    Export(ExportArgs),
}

#[derive(Debug, Args)]
pub struct FamilyArgs {
    /// Family id, e.g. `shortcut-square`, or `dyadic` together with `--regime`.
    #[arg(long)]
    pub family: Option<String>,
    /// Exponent for the families that take one.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Dyadic regime: dense, middle or extreme.
    #[arg(long)]
    pub regime: Option<String>,
    /// Allow indices beyond the documented caps.
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    /// Relative change between refinement rounds at which the solver stops.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Initial samples per boundary segment.
    #[arg(long)]
    pub samples_per_edge: Option<usize>,
    #[arg(long)]
    pub max_rounds: Option<usize>,
    /// Disable breakpoint smoothing.
    #[arg(long)]
    pub no_smoothing: bool,
}

#[derive(Debug, Args)]
pub struct DistanceArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long)]
    pub index: Option<u32>,
    /// Metric JSON file, instead of a family member.
    #[arg(long, value_name = "FILE", conflicts_with_all = ["family", "index", "alpha", "regime"])]
    pub metric: Option<PathBuf>,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub p: Point,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub q: Point,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Args)]
pub struct ConvergeArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Indices to run, comma separated.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub index: Vec<u32>,
    /// Distance to compare against; defaults to the family's limit.
    #[arg(long)]
    pub base: Option<String>,
    #[arg(long, value_enum)]
    pub strategy: Option<Strategy>,
    /// Pair count for random and feature-adjacent sampling, grid side for `grid`.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output path; the CSV and JSON summary take its stem with their own extensions.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Args)]
pub struct WitnessArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long)]
    pub index: Option<u32>,
    /// Lipschitz constant to test.
    #[arg(long)]
    pub c: f64,
    /// `lower` tests `c·d ≤ d_metric`, `upper` tests `d_metric ≤ c·d`.
    #[arg(long)]
    pub direction: String,
    /// Random candidates added when the family has no closed-form witnesses.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long)]
    pub index: Option<u32>,
    /// Write to this file instead of standard output.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    Random,
    Grid,
    Feature,
    Witnesses,
    /// Random pairs, feature-adjacent pairs and any closed-form witnesses.
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
    Both,
}

/// Contents of the `--config` file. Every key is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub family: Option<String>,
    pub index: Option<u32>,
    pub indices: Option<Vec<u32>>,
    pub alpha: Option<f64>,
    pub regime: Option<String>,
    pub force: Option<bool>,
    pub base: Option<String>,
    pub strategy: Option<Strategy>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    #[serde(default)]
    pub solver: FileSolver,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileSolver {
    pub samples_per_edge: Option<usize>,
    pub tolerance: Option<f64>,
    pub max_rounds: Option<usize>,
    pub smoothing: Option<bool>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, UsageError> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| UsageError(format!("config {}: {e}", path.display())))
    }
}

impl SolverArgs {
    /// Flags over file values over the defaults. Not validated here.
    pub fn resolve(&self, file: &FileSolver) -> SolverConfig {
        let d = SolverConfig::default();
        SolverConfig {
            samples_per_edge: self.samples_per_edge.or(file.samples_per_edge).unwrap_or(d.samples_per_edge),
            tolerance: self.tol.or(file.tolerance).unwrap_or(d.tolerance),
            max_rounds: self.max_rounds.or(file.max_rounds).unwrap_or(d.max_rounds),
            smoothing: if self.no_smoothing { false } else { file.smoothing.unwrap_or(d.smoothing) },
        }
    }
}

/// Parse `x,y` into a point of the unit square.
pub fn parse_point(s: &str) -> Result<Point, String> {
    let (x, y) = s.split_once(',').ok_or_else(|| format!("expected `x,y`, got `{s}`"))?;
    let coord = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("bad coordinate `{v}`: {e}"));
    Point::new(coord(x)?, coord(y)?).map_err(|e| e.to_string())
}
