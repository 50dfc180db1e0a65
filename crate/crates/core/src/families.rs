//! Indexed metric sequences and their limits.
//!
//! Each constructor builds one member of a family; [`MetricFamily`] wraps a
//! family id with its parameter and exposes the declared convergence rate,
//! the limit distance, index caps and the closed-form Lipschitz witnesses.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::FamilyError;
use crate::geometry::Point;
use crate::lab::Direction;
use crate::metric::{ConformalMetric, LineFeature};

/// Largest index built without `force` for `n`-indexed families.
pub const MAX_N: u32 = 64;
/// Largest index built without `force` for dyadic families.
pub const MAX_J: u32 = 12;
/// Hard limit for forced dyadic builds (`2^j` squares).
const FORCED_MAX_J: u32 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// `δ_j = 4^{-j}`: shrinking squares, uniform convergence to Euclidean.
    Dense,
    /// `δ_j = 2^{-(j+2)}`: squares separated by gaps of `2^{-(j+1)}`.
    Middle,
    /// `δ_j = 2^{-(j+1)}`: squares abut into a full strip.
    Extreme,
}

impl Regime {
    pub fn delta(self, j: u32) -> f64 {
        match self {
            Regime::Dense => 0.25f64.powi(j as i32),
            Regime::Middle => 0.5f64.powi(j as i32 + 2),
            Regime::Extreme => 0.5f64.powi(j as i32 + 1),
        }
    }
}

impl FromStr for Regime {
    type Err = FamilyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dense" => Ok(Regime::Dense),
            "middle" => Ok(Regime::Middle),
            "extreme" => Ok(Regime::Extreme),
            other => Err(FamilyError::Parameter(format!("unknown regime `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LimitKind {
    Euclidean,
    /// Midline collapsed to a point: feature weight 0 on `x = 1/2`.
    Quotient,
    /// Midline travelled at half cost: feature weight 1/2 on `x = 1/2`.
    Halfline,
}

impl FromStr for LimitKind {
    type Err = FamilyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "euclidean" | "euclid" => Ok(LimitKind::Euclidean),
            "quotient" => Ok(LimitKind::Quotient),
            "halfline" => Ok(LimitKind::Halfline),
            other => Err(FamilyError::Parameter(format!("unknown limit `{other}`"))),
        }
    }
}

impl fmt::Display for LimitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LimitKind::Euclidean => "euclidean",
            LimitKind::Quotient => "quotient",
            LimitKind::Halfline => "halfline",
        })
    }
}

fn check_n(n: u32, min: u32) -> Result<(), FamilyError> {
    if n < min {
        return Err(FamilyError::Parameter(format!("index must be at least {min}, got {n}")));
    }
    Ok(())
}

fn check_alpha(alpha: f64) -> Result<(), FamilyError> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(FamilyError::Parameter(format!("alpha must be positive, got {alpha}")));
    }
    Ok(())
}

/// `[(n-1)/(2n), (n+1)/(2n)]`, the centred interval of width `1/n`.
fn central_interval(n: u32) -> (f64, f64) {
    let n = f64::from(n);
    ((n - 1.0) / (2.0 * n), (n + 1.0) / (2.0 * n))
}

fn central_square(n: u32, weight: f64) -> Result<ConformalMetric, FamilyError> {
    let (lo, hi) = central_interval(n);
    let cuts = vec![0.0, lo, hi, 1.0];
    let rows = vec![vec![1.0; 3], vec![1.0, weight, 1.0], vec![1.0; 3]];
    Ok(ConformalMetric::from_grid(cuts.clone(), cuts, rows, vec![])?)
}

/// Weight `n^α` on the central square of side `1/n`, 1 elsewhere.
pub fn blowup_square(n: u32, alpha: f64) -> Result<ConformalMetric, FamilyError> {
    check_n(n, 2)?;
    check_alpha(alpha)?;
    central_square(n, f64::from(n).powf(alpha))
}

/// Unit weights plus a vertical line of weight `n^α` on `x = 1/2`.
pub fn blowup_center_line(n: u32, alpha: f64) -> Result<ConformalMetric, FamilyError> {
    check_n(n, 1)?;
    check_alpha(alpha)?;
    let line = LineFeature::vertical(0.5, f64::from(n).powf(alpha));
    Ok(ConformalMetric::new(crate::metric::RectPartition::uniform(1.0)?, vec![line])?)
}

/// Weight `n^{-α}` on the central square of side `1/n`, 1 elsewhere.
pub fn shortcut_square(n: u32, alpha: f64) -> Result<ConformalMetric, FamilyError> {
    check_n(n, 2)?;
    check_alpha(alpha)?;
    central_square(n, f64::from(n).powf(-alpha))
}

/// Weight `1/n` on the vertical slab `[(n-1)/(2n), (n+1)/(2n)] × [0,1]`.
pub fn shortcut_rectangle(n: u32) -> Result<ConformalMetric, FamilyError> {
    check_n(n, 2)?;
    let (lo, hi) = central_interval(n);
    let rows = vec![vec![1.0, 1.0 / f64::from(n), 1.0]];
    Ok(ConformalMetric::from_grid(vec![0.0, lo, hi, 1.0], vec![0.0, 1.0], rows, vec![])?)
}

/// Square centres `s_{i,j} = i / 2^j` for `i = 1..2^j-1`.
pub fn dyadic_centers(j: u32) -> Vec<f64> {
    let count = 1u64 << j;
    (1..count).map(|i| i as f64 / count as f64).collect()
}

/// Weight `1/j` on the squares `[1/2-δ, 1/2+δ] × [s_{i,j}-δ, s_{i,j}+δ]`.
pub fn dyadic_shortcuts(j: u32, regime: Regime) -> Result<ConformalMetric, FamilyError> {
    if !(1..=MAX_J).contains(&j) {
        return Err(FamilyError::IndexOutOfRange {
            family: FamilyId::dyadic(regime).to_string(),
            index: j,
            min: 1,
            max: MAX_J,
        });
    }
    build_dyadic(j, regime)
}

fn build_dyadic(j: u32, regime: Regime) -> Result<ConformalMetric, FamilyError> {
    let delta = regime.delta(j);
    let weight = 1.0 / f64::from(j);
    // Row boundaries alternate square bottom/top; abutting squares share one.
    let mut y_cuts = vec![0.0];
    let mut inside = Vec::new();
    for s in dyadic_centers(j) {
        let (lo, hi) = (s - delta, s + delta);
        if (lo - y_cuts[y_cuts.len() - 1]).abs() > 1e-12 {
            y_cuts.push(lo);
            inside.push(false);
        }
        y_cuts.push(hi);
        inside.push(true);
    }
    if 1.0 - y_cuts[y_cuts.len() - 1] > 1e-12 {
        y_cuts.push(1.0);
        inside.push(false);
    } else {
        let last = y_cuts.len() - 1;
        y_cuts[last] = 1.0;
    }
    let rows = inside
        .iter()
        .map(|&sq| vec![1.0, if sq { weight } else { 1.0 }, 1.0])
        .collect();
    let x_cuts = vec![0.0, 0.5 - delta, 0.5 + delta, 1.0];
    Ok(ConformalMetric::from_grid(x_cuts, y_cuts, rows, vec![])?)
}

/// Shortcuts on the rational points of a line. The set has zero length, so
/// every curve keeps its Euclidean length and the metric is the unit metric.
pub fn rational_line_shortcut(n: u32) -> Result<ConformalMetric, FamilyError> {
    check_n(n, 1)?;
    Ok(ConformalMetric::unit())
}

pub fn limit_metric(kind: LimitKind) -> ConformalMetric {
    let weight = match kind {
        LimitKind::Euclidean => return ConformalMetric::unit(),
        LimitKind::Quotient => 0.0,
        LimitKind::Halfline => 0.5,
    };
    let partition = crate::metric::RectPartition::uniform(1.0).expect("unit weight is valid");
    ConformalMetric::new(partition, vec![LineFeature::vertical(0.5, weight)]).expect("midline feature is valid")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyId {
    BlowupSquare,
    BlowupLine,
    ShortcutSquare,
    ShortcutRect,
    DyadicDense,
    DyadicMiddle,
    DyadicExtreme,
    RationalLine,
    LimitEuclid,
    LimitQuotient,
    LimitHalfline,
}

impl FamilyId {
    pub const ALL: [FamilyId; 11] = [
        FamilyId::BlowupSquare,
        FamilyId::BlowupLine,
        FamilyId::ShortcutSquare,
        FamilyId::ShortcutRect,
        FamilyId::DyadicDense,
        FamilyId::DyadicMiddle,
        FamilyId::DyadicExtreme,
        FamilyId::RationalLine,
        FamilyId::LimitEuclid,
        FamilyId::LimitQuotient,
        FamilyId::LimitHalfline,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FamilyId::BlowupSquare => "blowup-square",
            FamilyId::BlowupLine => "blowup-line",
            FamilyId::ShortcutSquare => "shortcut-square",
            FamilyId::ShortcutRect => "shortcut-rect",
            FamilyId::DyadicDense => "dyadic-dense",
            FamilyId::DyadicMiddle => "dyadic-middle",
            FamilyId::DyadicExtreme => "dyadic-extreme",
            FamilyId::RationalLine => "rational-line",
            FamilyId::LimitEuclid => "limit-euclid",
            FamilyId::LimitQuotient => "limit-quotient",
            FamilyId::LimitHalfline => "limit-halfline",
        }
    }

    pub fn regime(self) -> Option<Regime> {
        match self {
            FamilyId::DyadicDense => Some(Regime::Dense),
            FamilyId::DyadicMiddle => Some(Regime::Middle),
            FamilyId::DyadicExtreme => Some(Regime::Extreme),
            _ => None,
        }
    }

    /// Whether the family takes an exponent `α`.
    pub fn uses_alpha(self) -> bool {
        matches!(self, FamilyId::BlowupSquare | FamilyId::BlowupLine | FamilyId::ShortcutSquare)
    }

    /// The dyadic family of `regime`.
    pub fn dyadic(regime: Regime) -> FamilyId {
        match regime {
            Regime::Dense => FamilyId::DyadicDense,
            Regime::Middle => FamilyId::DyadicMiddle,
            Regime::Extreme => FamilyId::DyadicExtreme,
        }
    }

    /// Whether members differ by index at all.
    pub fn is_indexed(self) -> bool {
        !matches!(self, FamilyId::LimitEuclid | FamilyId::LimitQuotient | FamilyId::LimitHalfline)
    }
}


impl FromStr for FamilyId {
    type Err = FamilyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FamilyId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| FamilyError::UnknownFamily(s.to_string()))
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A pair on which a Lipschitz bound `c·d` fails, with closed-form values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Witness {
    pub p: Point,
    pub q: Point,
    pub direction: Direction,
    pub c: f64,
    /// Exact distance under the family member.
    pub metric_value: f64,
    /// Exact Euclidean distance.
    pub base_value: f64,
}

/// A family id bound to its exponent `α` (ignored where unused).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricFamily {
    id: FamilyId,
    alpha: f64,
}

impl MetricFamily {
    pub fn new(id: FamilyId, alpha: f64) -> Result<Self, FamilyError> {
        if id.uses_alpha() {
            check_alpha(alpha)?;
        }
        Ok(MetricFamily { id, alpha })
    }

    pub fn from_name(name: &str, alpha: f64) -> Result<Self, FamilyError> {
        MetricFamily::new(name.parse()?, alpha)
    }

    pub fn id(&self) -> FamilyId {
        self.id
    }

    pub fn name(&self) -> &'static str {
        self.id.as_str()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Supported index range without `force`.
    pub fn index_range(&self) -> (u32, u32) {
        match self.id {
            FamilyId::DyadicDense | FamilyId::DyadicMiddle | FamilyId::DyadicExtreme => (1, MAX_J),
            FamilyId::BlowupLine | FamilyId::RationalLine => (1, MAX_N),
            FamilyId::LimitEuclid | FamilyId::LimitQuotient | FamilyId::LimitHalfline => (0, u32::MAX),
            _ => (2, MAX_N),
        }
    }

    pub fn build(&self, index: u32) -> Result<ConformalMetric, FamilyError> {
        self.build_with(index, false)
    }

    /// Build member `index`; `force` lifts the desk-scale upper cap.
    pub fn build_with(&self, index: u32, force: bool) -> Result<ConformalMetric, FamilyError> {
        let (min, max) = self.index_range();
        let hard_max = match self.id.regime() {
            Some(_) if force => FORCED_MAX_J,
            _ if force => u32::MAX,
            _ => max,
        };
        if index < min || index > hard_max {
            return Err(FamilyError::IndexOutOfRange {
                family: self.name().to_string(),
                index,
                min,
                max: hard_max,
            });
        }
        let (n, a) = (index, self.alpha);
        match self.id {
            FamilyId::BlowupSquare => blowup_square(n, a),
            FamilyId::BlowupLine => blowup_center_line(n, a),
            FamilyId::ShortcutSquare => shortcut_square(n, a),
            FamilyId::ShortcutRect => shortcut_rectangle(n),
            FamilyId::DyadicDense => build_dyadic(n, Regime::Dense),
            FamilyId::DyadicMiddle => build_dyadic(n, Regime::Middle),
            FamilyId::DyadicExtreme => build_dyadic(n, Regime::Extreme),
            FamilyId::RationalLine => rational_line_shortcut(n),
            FamilyId::LimitEuclid => Ok(limit_metric(LimitKind::Euclidean)),
            FamilyId::LimitQuotient => Ok(limit_metric(LimitKind::Quotient)),
            FamilyId::LimitHalfline => Ok(limit_metric(LimitKind::Halfline)),
        }
    }

    /// Limit of the distance functions, or `None` if they do not converge
    /// uniformly.
    pub fn limit(&self) -> Option<LimitKind> {
        match self.id {
            FamilyId::BlowupSquare if self.alpha >= 1.0 => None,
            FamilyId::ShortcutRect | FamilyId::DyadicExtreme | FamilyId::LimitQuotient => Some(LimitKind::Quotient),
            FamilyId::DyadicMiddle | FamilyId::LimitHalfline => Some(LimitKind::Halfline),
            _ => Some(LimitKind::Euclidean),
        }
    }

    /// Distance the family is compared against: its limit, or Euclidean
    /// when there is none.
    pub fn base(&self) -> LimitKind {
        self.limit().unwrap_or(LimitKind::Euclidean)
    }

    /// Symbolic form of the declared rate `C_n`.
    pub fn rate_formula(&self) -> Option<&'static str> {
        Some(match self.id {
            FamilyId::BlowupSquare if self.alpha >= 1.0 => return None,
            FamilyId::BlowupSquare => "2 n^alpha / n",
            FamilyId::ShortcutSquare => "sqrt(2) / n^alpha",
            FamilyId::ShortcutRect => "2 / n",
            FamilyId::DyadicDense => "(1 - 1/j) (2^j - 1) 2 sqrt(2) 4^-j",
            FamilyId::DyadicMiddle => "sqrt(2) / (2 j)",
            FamilyId::DyadicExtreme => "(1 - 2^-j) / j + 2^-j",
            _ => "0",
        })
    }

    /// Declared bound `C_n` on `sup |d_n - d_limit|`.
    pub fn rate(&self, index: u32) -> Option<f64> {
        let n = f64::from(index);
        Some(match self.id {
            FamilyId::BlowupSquare if self.alpha >= 1.0 => return None,
            FamilyId::BlowupSquare => 2.0 * n.powf(self.alpha) / n,
            FamilyId::ShortcutSquare => std::f64::consts::SQRT_2 / n.powf(self.alpha),
            FamilyId::ShortcutRect => 2.0 / n,
            FamilyId::DyadicDense => {
                let count = 2f64.powi(index as i32) - 1.0;
                (1.0 - 1.0 / n) * count * 2.0 * std::f64::consts::SQRT_2 * Regime::Dense.delta(index)
            }
            FamilyId::DyadicMiddle => std::f64::consts::SQRT_2 / (2.0 * n),
            FamilyId::DyadicExtreme => {
                let h = 0.5f64.powi(index as i32);
                (1.0 - h) / n + h
            }
            _ => 0.0,
        })
    }

    /// Closed-form pairs on which a Lipschitz bound against the Euclidean
    /// distance fails for member `index`.
    pub fn witnesses(&self, index: u32) -> Vec<Witness> {
        let pt = |x: f64, y: f64| Point::new(x, y).expect("witness lies in the unit square");
        let n = f64::from(index);
        match self.id {
            FamilyId::BlowupSquare if index >= 2 => {
                let base = 1.0 / (2.0 * n);
                let na = n.powf(self.alpha);
                vec![Witness {
                    p: pt(0.5, 0.5),
                    q: pt((n + 1.0) / (2.0 * n), 0.5),
                    direction: Direction::Upper,
                    c: na / 2.0,
                    metric_value: na * base,
                    base_value: base,
                }]
            }
            FamilyId::ShortcutSquare if index >= 2 => {
                let base = 1.0 / (2.0 * n);
                let na = n.powf(self.alpha);
                vec![Witness {
                    p: pt(0.5, 0.5),
                    q: pt((n - 1.0) / (2.0 * n), 0.5),
                    direction: Direction::Lower,
                    c: 2.0 / na,
                    metric_value: base / na,
                    base_value: base,
                }]
            }
            FamilyId::DyadicDense | FamilyId::DyadicMiddle | FamilyId::DyadicExtreme if index >= 1 => {
                let regime = self.id.regime().expect("dyadic family");
                let delta = regime.delta(index);
                dyadic_centers(index)
                    .into_iter()
                    .map(|s| {
                        let (p, q) = match regime {
                            Regime::Extreme => (pt(0.5 - delta, s), pt(0.5 + delta, s)),
                            _ => (pt(0.5, s - delta), pt(0.5, s + delta)),
                        };
                        Witness {
                            p,
                            q,
                            direction: Direction::Lower,
                            c: 2.0 / n,
                            metric_value: 2.0 * delta / n,
                            base_value: 2.0 * delta,
                        }
                    })
                    .collect()
            }
            _ => Vec::new(),
        }
    }

    /// Length scale of the features of member `index`, used to place
    /// feature-adjacent sample pairs.
    pub fn feature_scale(&self, index: u32) -> f64 {
        match self.id {
            FamilyId::BlowupSquare | FamilyId::ShortcutSquare | FamilyId::ShortcutRect => {
                1.0 / (2.0 * f64::from(index.max(1)))
            }
            FamilyId::DyadicDense | FamilyId::DyadicMiddle | FamilyId::DyadicExtreme => {
                self.id.regime().expect("dyadic family").delta(index)
            }
            _ => 0.05,
        }
    }

    /// Direction and constant `c` of the Lipschitz bound the family breaks.
    pub fn lipschitz_failure(&self, index: u32) -> Option<(Direction, f64)> {
        self.witnesses(index).first().map(|w| (w.direction, w.c))
    }
}
