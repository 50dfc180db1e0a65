//! Random metric generators shared by the integration tests.
#![allow(dead_code)]

use rand::Rng;
use rough_metric::{ConformalMetric, LineFeature, Point};

pub fn pt(x: f64, y: f64) -> Point {
    Point::new(x, y).unwrap()
}

pub fn random_point(rng: &mut impl Rng) -> Point {
    pt(rng.gen(), rng.gen())
}

fn random_cuts(rng: &mut impl Rng, interior: usize) -> Vec<f64> {
    let mut cuts: Vec<f64> = (0..interior).map(|_| rng.gen_range(0.05..0.95)).collect();
    cuts.push(0.0);
    cuts.push(1.0);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 0.02);
    cuts
}

fn weight_at(cuts_x: &[f64], cuts_y: &[f64], weights: &[Vec<f64>], x: f64, y: f64) -> f64 {
    let i = cuts_x.windows(2).position(|w| x < w[1]).unwrap_or(cuts_x.len() - 2);
    let j = cuts_y.windows(2).position(|w| y < w[1]).unwrap_or(cuts_y.len() - 2);
    weights[j][i]
}

/// A metric on a random grid of up to 4×4 cells with weights in
/// `[0.2, 3]` and at most one full-length feature line.
pub fn random_metric(rng: &mut impl Rng) -> ConformalMetric {
    random_ordered_pair(rng).0
}

/// Random metrics `(g, f)` with `g ≤ f` pointwise. `f` lives on a refinement
/// of the grid of `g` and scales each weight by a factor in `[1, 2]`.
pub fn random_ordered_pair(rng: &mut impl Rng) -> (ConformalMetric, ConformalMetric) {
    let nx = rng.gen_range(0..4);
    let ny = rng.gen_range(0..4);
    let xs = random_cuts(rng, nx);
    let ys = random_cuts(rng, ny);
    let weights: Vec<Vec<f64>> = (0..ys.len() - 1)
        .map(|_| (0..xs.len() - 1).map(|_| rng.gen_range(0.2..3.0)).collect())
        .collect();
    let feature = if rng.gen_bool(0.4) {
        let position = rng.gen_range(0.1..0.9);
        let weight = rng.gen_range(0.0..1.0);
        Some(if rng.gen_bool(0.5) {
            LineFeature::vertical(position, weight)
        } else {
            LineFeature::horizontal(position, weight)
        })
    } else {
        None
    };
    let g = ConformalMetric::from_grid(xs.clone(), ys.clone(), weights.clone(), feature.into_iter().collect())
        .unwrap();

    let mut fx = xs.clone();
    fx.extend(random_cuts(rng, 2));
    fx.sort_by(f64::total_cmp);
    fx.dedup();
    let mut fy = ys.clone();
    fy.extend(random_cuts(rng, 2));
    fy.sort_by(f64::total_cmp);
    fy.dedup();
    let f_weights: Vec<Vec<f64>> = fy
        .windows(2)
        .map(|wy| {
            fx.windows(2)
                .map(|wx| {
                    let base = weight_at(&xs, &ys, &weights, 0.5 * (wx[0] + wx[1]), 0.5 * (wy[0] + wy[1]));
                    base * rng.gen_range(1.0..2.0)
                })
                .collect()
        })
        .collect();
    let f_features = feature
        .filter(|_| rng.gen_bool(0.5))
        .map(|mut line| {
            line.weight *= rng.gen_range(1.0..1.5);
            line
        })
        .into_iter()
        .collect();
    let f = ConformalMetric::from_grid(fx, fy, f_weights, f_features).unwrap();
    (g, f)
}
