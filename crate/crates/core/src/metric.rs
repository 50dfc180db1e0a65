//! Piecewise-constant conformal metrics on the unit square.
//!
//! A [`ConformalMetric`] is a tensor-grid partition of `[0,1]²` into
//! rectangular cells, each carrying a positive weight, together with a list of
//! axis-aligned [`LineFeature`]s that carry their own weight on a segment of a
//! cut line. The weighted length of a curve is
//!
//! ```text
//! L_f(γ) = ∫ f(γ(t)) |γ'(t)| dt
//! ```
//!
//! and for polylines this integral becomes a finite sum over the pieces
//! produced by clipping every segment against the grid ([`ConformalMetric::weight_along`]).
//!
//! A curve running *along* a cut line sees the effective weight of that line:
//! the minimum of the adjacent cell weights and of every feature weight lying
//! on it. A curve crossing a line transversally is unaffected by it.

use serde::{Deserialize, Serialize};

use crate::error::MetricError;
use crate::geometry::{euclid_dist, Point, Polyline, COORD_EPS};

/// Sub-segments shorter than this are dropped by the clipper.
pub const MIN_PIECE: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Vertical,
    Horizontal,
}

/// A weighted segment of the line `x = position` (vertical) or `y = position`
/// (horizontal), covering `span` in the other coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFeature {
    pub axis: Axis,
    pub position: f64,
    pub span: [f64; 2],
    pub weight: f64,
}

impl LineFeature {
    pub fn vertical(x: f64, weight: f64) -> Self {
        LineFeature {
            axis: Axis::Vertical,
            position: x,
            span: [0.0, 1.0],
            weight,
        }
    }

    pub fn horizontal(y: f64, weight: f64) -> Self {
        LineFeature {
            axis: Axis::Horizontal,
            position: y,
            span: [0.0, 1.0],
            weight,
        }
    }

    fn validate(&self) -> Result<(), MetricError> {
        let [lo, hi] = self.span;
        if !(0.0..=1.0).contains(&self.position) {
            return Err(MetricError::Feature(format!(
                "position {} outside [0,1]",
                self.position
            )));
        }
        if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || hi - lo <= COORD_EPS {
            return Err(MetricError::Feature(format!(
                "span [{lo}, {hi}] must be a non-degenerate sub-interval of [0,1]"
            )));
        }
        if !self.weight.is_finite() || self.weight < 0.0 {
            return Err(MetricError::Feature(format!(
                "weight {} must be finite and non-negative",
                self.weight
            )));
        }
        Ok(())
    }

    fn covers(&self, lo: f64, hi: f64) -> bool {
        self.span[0] <= lo + COORD_EPS && self.span[1] >= hi - COORD_EPS
    }
}

/// Tensor-grid partition of the unit square with one weight per cell.
///
/// Cell `(i, j)` is `[x_i, x_{i+1}] × [y_j, y_{j+1}]`; weights are stored
/// row-major with `y` as the outer index.
#[derive(Debug, Clone, PartialEq)]
pub struct RectPartition {
    x_cuts: Vec<f64>,
    y_cuts: Vec<f64>,
    weights: Vec<f64>,
}

impl RectPartition {
    /// `cell_weights[j][i]` is the weight of column `i`, row `j`.
    pub fn new(
        x_cuts: Vec<f64>,
        y_cuts: Vec<f64>,
        cell_weights: Vec<Vec<f64>>,
    ) -> Result<Self, MetricError> {
        let x_cuts = validate_cuts(x_cuts, "x")?;
        let y_cuts = validate_cuts(y_cuts, "y")?;
        let (nx, ny) = (x_cuts.len() - 1, y_cuts.len() - 1);
        if cell_weights.len() != ny || cell_weights.iter().any(|row| row.len() != nx) {
            return Err(MetricError::Partition(format!(
                "cell_weights must be {ny} rows of {nx} entries"
            )));
        }
        let weights: Vec<f64> = cell_weights.into_iter().flatten().collect();
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(MetricError::Partition(format!(
                "cell weight {w} must be finite and strictly positive"
            )));
        }
        Ok(RectPartition {
            x_cuts,
            y_cuts,
            weights,
        })
    }

    pub fn uniform(weight: f64) -> Result<Self, MetricError> {
        RectPartition::new(vec![0.0, 1.0], vec![0.0, 1.0], vec![vec![weight]])
    }

    pub fn x_cuts(&self) -> &[f64] {
        &self.x_cuts
    }

    pub fn y_cuts(&self) -> &[f64] {
        &self.y_cuts
    }

    pub fn nx(&self) -> usize {
        self.x_cuts.len() - 1
    }

    pub fn ny(&self) -> usize {
        self.y_cuts.len() - 1
    }

    #[inline]
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[j * self.nx() + i]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.weights.chunks(self.nx()).map(<[f64]>::to_vec).collect()
    }

    /// Column whose half-open interval `[x_i, x_{i+1})` holds `x`; `x = 1` maps to the last column.
    #[inline]
    pub fn column_of(&self, x: f64) -> usize {
        locate(&self.x_cuts, x)
    }

    #[inline]
    pub fn row_of(&self, y: f64) -> usize {
        locate(&self.y_cuts, y)
    }

    fn weight_at_mid(&self, x: f64, y: f64) -> f64 {
        self.weight(self.column_of(x), self.row_of(y))
    }
}

fn validate_cuts(mut cuts: Vec<f64>, name: &str) -> Result<Vec<f64>, MetricError> {
    if cuts.len() < 2 {
        return Err(MetricError::Partition(format!(
            "{name}_cuts needs at least two entries"
        )));
    }
    let last = cuts.len() - 1;
    if (cuts[0]).abs() > COORD_EPS || (cuts[last] - 1.0).abs() > COORD_EPS {
        return Err(MetricError::Partition(format!(
            "{name}_cuts must start at 0 and end at 1"
        )));
    }
    cuts[0] = 0.0;
    cuts[last] = 1.0;
    if cuts.iter().any(|c| !c.is_finite()) || cuts.windows(2).any(|w| w[1] - w[0] <= COORD_EPS) {
        return Err(MetricError::Partition(format!(
            "{name}_cuts must be strictly increasing"
        )));
    }
    Ok(cuts)
}

#[inline]
fn locate(cuts: &[f64], v: f64) -> usize {
    let k = cuts.partition_point(|c| *c <= v);
    k.saturating_sub(1).min(cuts.len() - 2)
}

/// Index of the cut equal to `v` within [`COORD_EPS`], if any.
#[inline]
pub(crate) fn cut_index(cuts: &[f64], v: f64) -> Option<usize> {
    let k = cuts.partition_point(|c| *c < v - COORD_EPS);
    (k < cuts.len() && (cuts[k] - v).abs() <= COORD_EPS).then_some(k)
}

/// Sorted union of two cut lists, collapsing values closer than [`COORD_EPS`].
/// Values from `base` win over values from `extra` when they collide.
fn merge_cuts(base: &[f64], extra: &[f64]) -> Vec<f64> {
    let mut all: Vec<(f64, bool)> = base
        .iter()
        .map(|&c| (c, true))
        .chain(extra.iter().map(|&c| (c, false)))
        .collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.cmp(&a.1)));
    let mut out: Vec<(f64, bool)> = Vec::with_capacity(all.len());
    for (c, from_base) in all {
        match out.last_mut() {
            Some(last) if (c - last.0).abs() <= COORD_EPS => {
                if from_base && !last.1 {
                    *last = (c, true);
                }
            }
            _ => out.push((c, from_base)),
        }
    }
    out.into_iter().map(|(c, _)| c).collect()
}

/// A piecewise-constant conformal factor on `[0,1]²`.
///
/// Immutable once built. Construction normalizes the input: every feature
/// line (and its span endpoints) becomes a cut, and cut lines separating
/// identical cells along their whole length are removed, unless a feature
/// needs them.
#[derive(Debug, Clone, PartialEq)]
pub struct ConformalMetric {
    partition: RectPartition,
    features: Vec<LineFeature>,
    pseudometric: bool,
    /// Effective weight on vertical cut segments, index `i * ny + j`.
    vert_eff: Vec<f64>,
    /// Effective weight on horizontal cut segments, index `j * nx + i`.
    horiz_eff: Vec<f64>,
    w_min: f64,
    w_max: f64,
}

impl ConformalMetric {
    pub fn new(partition: RectPartition, features: Vec<LineFeature>) -> Result<Self, MetricError> {
        for f in &features {
            f.validate()?;
        }
        let pseudometric = features.iter().any(|f| f.weight == 0.0);
        let (partition, features) = normalize(partition, features)?;
        Ok(Self::assemble(partition, features, pseudometric))
    }

    /// Shorthand for a partition given by cuts and rows of weights.
    pub fn from_grid(
        x_cuts: Vec<f64>,
        y_cuts: Vec<f64>,
        cell_weights: Vec<Vec<f64>>,
        features: Vec<LineFeature>,
    ) -> Result<Self, MetricError> {
        ConformalMetric::new(RectPartition::new(x_cuts, y_cuts, cell_weights)?, features)
    }

    /// The Euclidean metric (`f ≡ 1`).
    pub fn unit() -> Self {
        ConformalMetric::new(RectPartition::uniform(1.0).expect("unit partition"), vec![])
            .expect("unit metric")
    }

    fn assemble(partition: RectPartition, features: Vec<LineFeature>, pseudometric: bool) -> Self {
        let (nx, ny) = (partition.nx(), partition.ny());
        let xs = &partition.x_cuts;
        let ys = &partition.y_cuts;

        let mut vert_eff = vec![f64::INFINITY; (nx + 1) * ny];
        for i in 0..=nx {
            for j in 0..ny {
                let mut w = f64::INFINITY;
                if i > 0 {
                    w = w.min(partition.weight(i - 1, j));
                }
                if i < nx {
                    w = w.min(partition.weight(i, j));
                }
                for f in features.iter().filter(|f| {
                    f.axis == Axis::Vertical && (f.position - xs[i]).abs() <= COORD_EPS
                }) {
                    if f.covers(ys[j], ys[j + 1]) {
                        w = w.min(f.weight);
                    }
                }
                vert_eff[i * ny + j] = w;
            }
        }

        let mut horiz_eff = vec![f64::INFINITY; (ny + 1) * nx];
        for j in 0..=ny {
            for i in 0..nx {
                let mut w = f64::INFINITY;
                if j > 0 {
                    w = w.min(partition.weight(i, j - 1));
                }
                if j < ny {
                    w = w.min(partition.weight(i, j));
                }
                for f in features.iter().filter(|f| {
                    f.axis == Axis::Horizontal && (f.position - ys[j]).abs() <= COORD_EPS
                }) {
                    if f.covers(xs[i], xs[i + 1]) {
                        w = w.min(f.weight);
                    }
                }
                horiz_eff[j * nx + i] = w;
            }
        }

        let weights = partition
            .weights
            .iter()
            .copied()
            .chain(features.iter().map(|f| f.weight));
        let (w_min, w_max) = weights.fold((f64::INFINITY, 0.0f64), |(lo, hi), w| {
            (lo.min(w), hi.max(w))
        });

        ConformalMetric {
            partition,
            features,
            pseudometric,
            vert_eff,
            horiz_eff,
            w_min,
            w_max,
        }
    }

    pub fn partition(&self) -> &RectPartition {
        &self.partition
    }

    pub fn features(&self) -> &[LineFeature] {
        &self.features
    }

    pub fn is_pseudometric(&self) -> bool {
        self.pseudometric
    }

    /// Smallest weight anywhere, features included.
    pub fn w_min(&self) -> f64 {
        self.w_min
    }

    /// Largest weight anywhere, features included.
    pub fn w_max(&self) -> f64 {
        self.w_max
    }

    /// Effective weight of the vertical cut segment at `x_cuts[i]`, row `j`.
    #[inline]
    pub fn vertical_edge_weight(&self, i: usize, j: usize) -> f64 {
        self.vert_eff[i * self.partition.ny() + j]
    }

    /// Effective weight of the horizontal cut segment at `y_cuts[j]`, column `i`.
    #[inline]
    pub fn horizontal_edge_weight(&self, j: usize, i: usize) -> f64 {
        self.horiz_eff[j * self.partition.nx() + i]
    }

    /// Weight of the cell containing `p` (half-open cells; ties go up/right).
    pub fn cell_weight_at(&self, p: Point) -> f64 {
        self.partition.weight_at_mid(p.x(), p.y())
    }

    /// Every metric weight multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self, MetricError> {
        if !(c.is_finite() && c > 0.0) {
            return Err(MetricError::Partition(format!("scale {c} must be positive")));
        }
        let mut partition = self.partition.clone();
        partition.weights.iter_mut().for_each(|w| *w *= c);
        let features = self
            .features
            .iter()
            .map(|f| LineFeature {
                weight: f.weight * c,
                ..*f
            })
            .collect();
        Ok(Self::assemble(partition, features, self.pseudometric))
    }

    /// Calls `visit(sub_length, weight)` for each piece of segment `a → b`
    /// after clipping against the grid.
    #[inline]
    pub(crate) fn for_each_piece(&self, a: Point, b: Point, mut visit: impl FnMut(f64, f64)) {
        let len = euclid_dist(a, b);
        if len <= MIN_PIECE {
            return;
        }
        let part = &self.partition;
        let (dx, dy) = (b.x() - a.x(), b.y() - a.y());
        let vertical = dx.abs() <= COORD_EPS;
        let horizontal = dy.abs() <= COORD_EPS;

        let mut ts: Vec<f64> = Vec::with_capacity(8);
        ts.push(0.0);
        if !vertical {
            push_crossings(&part.x_cuts, a.x(), dx, &mut ts);
        }
        if !horizontal {
            push_crossings(&part.y_cuts, a.y(), dy, &mut ts);
        }
        ts.push(1.0);
        ts.sort_by(f64::total_cmp);

        let on_vline = if vertical {
            cut_index(&part.x_cuts, 0.5 * (a.x() + b.x()))
        } else {
            None
        };
        let on_hline = if horizontal {
            cut_index(&part.y_cuts, 0.5 * (a.y() + b.y()))
        } else {
            None
        };

        for w in ts.windows(2) {
            let piece = (w[1] - w[0]) * len;
            if piece < MIN_PIECE {
                continue;
            }
            let tm = 0.5 * (w[0] + w[1]);
            let (mx, my) = (a.x() + tm * dx, a.y() + tm * dy);
            let weight = if let Some(i) = on_vline {
                self.vertical_edge_weight(i, part.row_of(my))
            } else if let Some(j) = on_hline {
                self.horizontal_edge_weight(j, part.column_of(mx))
            } else {
                part.weight_at_mid(mx, my)
            };
            visit(piece, weight);
        }
    }

    /// Clip the segment `a → b` against the partition: `(sub_length, weight)` pieces
    /// in order from `a`. Sub-lengths are positive and sum to `|b - a|`.
    pub fn weight_along(&self, a: Point, b: Point) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        self.for_each_piece(a, b, |l, w| out.push((l, w)));
        out
    }

    /// Weighted length of the straight segment `a → b`.
    #[inline]
    pub fn segment_length(&self, a: Point, b: Point) -> f64 {
        let mut total = 0.0;
        self.for_each_piece(a, b, |l, w| total += l * w);
        total
    }

    /// Weighted length `L_f(γ)` of a polyline.
    pub fn path_length(&self, path: &Polyline) -> f64 {
        path.segments().map(|(a, b)| self.segment_length(a, b)).sum()
    }

    /// Effective weight seen by a curve running along the vertical line `x`
    /// near height `y`: a cut-line weight if `x` is a cut, else the cell weight.
    fn vertical_line_weight(&self, x: f64, y: f64) -> f64 {
        match cut_index(&self.partition.x_cuts, x) {
            Some(i) => self.vertical_edge_weight(i, self.partition.row_of(y)),
            None => self.partition.weight_at_mid(x, y),
        }
    }

    fn horizontal_line_weight(&self, y: f64, x: f64) -> f64 {
        match cut_index(&self.partition.y_cuts, y) {
            Some(j) => self.horizontal_edge_weight(j, self.partition.column_of(x)),
            None => self.partition.weight_at_mid(x, y),
        }
    }

    pub fn to_document(&self) -> MetricDocument {
        MetricDocument {
            x_cuts: self.partition.x_cuts.clone(),
            y_cuts: self.partition.y_cuts.clone(),
            cell_weights: self.partition.rows(),
            features: self.features.clone(),
            pseudometric: self.pseudometric,
        }
    }

    pub fn from_document(doc: MetricDocument) -> Result<Self, MetricError> {
        let declared = doc.pseudometric;
        let m = ConformalMetric::from_grid(doc.x_cuts, doc.y_cuts, doc.cell_weights, doc.features)?;
        if m.pseudometric != declared {
            return Err(MetricError::PseudometricFlag {
                declared,
                derived: m.pseudometric,
            });
        }
        Ok(m)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("metric document serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, MetricError> {
        let doc: MetricDocument =
            serde_json::from_str(text).map_err(|e| MetricError::Document(e.to_string()))?;
        ConformalMetric::from_document(doc)
    }
}

fn push_crossings(cuts: &[f64], start: f64, delta: f64, ts: &mut Vec<f64>) {
    let end = start + delta;
    let (lo, hi) = if delta > 0.0 { (start, end) } else { (end, start) };
    let first = cuts.partition_point(|c| *c <= lo);
    for &c in cuts[first..].iter().take_while(|c| **c < hi) {
        let t = (c - start) / delta;
        if t > 0.0 && t < 1.0 {
            ts.push(t);
        }
    }
}

fn normalize(
    partition: RectPartition,
    mut features: Vec<LineFeature>,
) -> Result<(RectPartition, Vec<LineFeature>), MetricError> {
    let mut need_x = Vec::new();
    let mut need_y = Vec::new();
    for f in &features {
        let (along, across) = match f.axis {
            Axis::Vertical => (&mut need_x, &mut need_y),
            Axis::Horizontal => (&mut need_y, &mut need_x),
        };
        along.push(f.position);
        across.extend(f.span);
    }

    let xs = merge_cuts(&partition.x_cuts, &need_x);
    let ys = merge_cuts(&partition.y_cuts, &need_y);
    let (nx, ny) = (xs.len() - 1, ys.len() - 1);
    let mut w = vec![0.0; nx * ny];
    for j in 0..ny {
        let ym = 0.5 * (ys[j] + ys[j + 1]);
        for i in 0..nx {
            let xm = 0.5 * (xs[i] + xs[i + 1]);
            w[j * nx + i] = partition.weight_at_mid(xm, ym);
        }
    }

    let required = |cuts: &[f64], v: f64| cuts.iter().any(|c| (c - v).abs() <= COORD_EPS);
    let keep_x: Vec<bool> = (0..=nx)
        .map(|k| {
            k == 0
                || k == nx
                || required(&need_x, xs[k])
                || (0..ny).any(|j| w[j * nx + k - 1] != w[j * nx + k])
        })
        .collect();
    let keep_y: Vec<bool> = (0..=ny)
        .map(|k| {
            k == 0
                || k == ny
                || required(&need_y, ys[k])
                || (0..nx).any(|i| w[(k - 1) * nx + i] != w[k * nx + i])
        })
        .collect();

    let col_starts: Vec<usize> = (0..nx).filter(|&i| keep_x[i]).collect();
    let row_starts: Vec<usize> = (0..ny).filter(|&j| keep_y[j]).collect();
    let new_x: Vec<f64> = (0..=nx).filter(|&k| keep_x[k]).map(|k| xs[k]).collect();
    let new_y: Vec<f64> = (0..=ny).filter(|&k| keep_y[k]).map(|k| ys[k]).collect();
    let weights: Vec<f64> = row_starts
        .iter()
        .flat_map(|&j| col_starts.iter().map(move |&i| (i, j)))
        .map(|(i, j)| w[j * nx + i])
        .collect();

    let snap = |cuts: &[f64], v: f64| cut_index(cuts, v).map_or(v, |k| cuts[k]);
    for f in &mut features {
        let (along, across) = match f.axis {
            Axis::Vertical => (&new_x, &new_y),
            Axis::Horizontal => (&new_y, &new_x),
        };
        f.position = snap(along, f.position);
        f.span = [snap(across, f.span[0]), snap(across, f.span[1])];
    }

    Ok((
        RectPartition {
            x_cuts: new_x,
            y_cuts: new_y,
            weights,
        },
        features,
    ))
}

/// `a ≤ b` pointwise: every cell weight and every effective line weight of
/// `a` is at most the corresponding weight of `b` on the common refinement.
pub fn pointwise_leq(a: &ConformalMetric, b: &ConformalMetric) -> bool {
    const EPS: f64 = 1e-12;
    let xs = merge_cuts(&a.partition.x_cuts, &b.partition.x_cuts);
    let ys = merge_cuts(&a.partition.y_cuts, &b.partition.y_cuts);
    let mids = |cuts: &[f64]| -> Vec<f64> { cuts.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect() };
    let (xm, ym) = (mids(&xs), mids(&ys));

    let cells_ok = ym.iter().all(|&y| {
        xm.iter()
            .all(|&x| a.partition.weight_at_mid(x, y) <= b.partition.weight_at_mid(x, y) + EPS)
    });
    let vertical_ok = xs.iter().all(|&x| {
        ym.iter()
            .all(|&y| a.vertical_line_weight(x, y) <= b.vertical_line_weight(x, y) + EPS)
    });
    let horizontal_ok = ys.iter().all(|&y| {
        xm.iter()
            .all(|&x| a.horizontal_line_weight(y, x) <= b.horizontal_line_weight(y, x) + EPS)
    });
    cells_ok && vertical_ok && horizontal_ok
}

/// JSON form of a metric. `cell_weights[j][i]` is the weight of column `i`
/// in row `j` (rows ordered by increasing `y`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricDocument {
    pub x_cuts: Vec<f64>,
    pub y_cuts: Vec<f64>,
    pub cell_weights: Vec<Vec<f64>>,
    #[serde(default)]
    pub features: Vec<LineFeature>,
    #[serde(default)]
    pub pseudometric: bool,
}
