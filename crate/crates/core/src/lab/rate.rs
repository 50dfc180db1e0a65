use serde::Serialize;

use crate::error::LabError;

/// Power law `gap ≈ coefficient · n^{-exponent}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateFit {
    pub coefficient: f64,
    pub exponent: f64,
}

/// Least-squares fit of `log gap = log A − β log n`.
pub fn rate_fit(values: &[(u32, f64)]) -> Result<RateFit, LabError> {
    if values.len() < 3 {
        return Err(LabError::TooFewPoints(values.len()));
    }
    if let Some(&(index, gap)) = values.iter().find(|(_, g)| !(*g > 0.0 && g.is_finite())) {
        return Err(LabError::NonPositiveGap { index, gap });
    }
    let pts: Vec<(f64, f64)> = values.iter().map(|&(n, g)| (f64::from(n).ln(), g.ln())).collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(LabError::Argument("rate fit needs at least two distinct indices".into()));
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Ok(RateFit {
        coefficient: (my - slope * mx).exp(),
        exponent: -slope,
    })
}
