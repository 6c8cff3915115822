//! Correlations between faculties after removing a general factor.

use serde::{Deserialize, Serialize};

use super::{pearson, AnalysisError};
use crate::sample::Faculty;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CapabilityMatrix {
    /// Rows and columns in `Faculty::ALL` order.
    pub values: [[f64; 5]; 5],
    /// Per-faculty residuals, one entry per model.
    pub residuals: Vec<Vec<f64>>,
    /// Per-faculty (intercept, slope).
    pub fits: Vec<(f64, f64)>,
}

impl CapabilityMatrix {
    pub fn get(&self, a: Faculty, b: Faculty) -> f64 {
        let i = |f: Faculty| Faculty::ALL.iter().position(|g| *g == f).expect("known faculty");
        self.values[i(a)][i(b)]
    }
}

/// Regresses each faculty column of `scores` (models x 5) on the general
/// score `general` by least squares and correlates the residuals.
pub fn residual_capability_matrix(scores: &[[f64; 5]], general: &[f64]) -> Result<CapabilityMatrix, AnalysisError> {
    let m = scores.len();
    if m != general.len() {
        return Err(AnalysisError::Input(format!("{m} score rows but {} general scores", general.len())));
    }
    if m < 3 {
        return Err(AnalysisError::DegenerateFit(format!("{m} models; at least 3 are needed")));
    }
    let gm = general.iter().sum::<f64>() / m as f64;
    let sgg: f64 = general.iter().map(|g| (g - gm).powi(2)).sum();
    if sgg == 0.0 {
        return Err(AnalysisError::DegenerateFit("general factor has no variance".into()));
    }
    let mut residuals = Vec::with_capacity(5);
    let mut fits = Vec::with_capacity(5);
    for c in 0..5 {
        let y: Vec<f64> = scores.iter().map(|r| r[c]).collect();
        let ym = y.iter().sum::<f64>() / m as f64;
        let sgy: f64 = general.iter().zip(&y).map(|(g, v)| (g - gm) * (v - ym)).sum();
        let b = sgy / sgg;
        let a = ym - b * gm;
        let e: Vec<f64> = general.iter().zip(&y).map(|(g, v)| v - (a + b * g)).collect();
        let scale = y.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1e-300);
        if e.iter().all(|r| r.abs() <= 1e-12 * scale) {
            return Err(AnalysisError::DegenerateFit(format!("{} is exactly affine in the general factor", Faculty::ALL[c])));
        }
        residuals.push(e);
        fits.push((a, b));
    }
    let mut values = [[0.0; 5]; 5];
    for i in 0..5 {
        values[i][i] = 1.0;
        for j in i + 1..5 {
            let r = pearson(&residuals[i], &residuals[j])?;
            values[i][j] = r;
            values[j][i] = r;
        }
    }
    Ok(CapabilityMatrix { values, residuals, fits })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn affine_scores_are_degenerate() {
        let g = [0.1, 0.4, 0.5, 0.9];
        let s: Vec<[f64; 5]> = g.iter().map(|&x| [x * 2.0, x + 0.1, 0.3 - x, x, 0.5 * x]).collect();
        assert!(matches!(residual_capability_matrix(&s, &g), Err(AnalysisError::DegenerateFit(_))));
        assert!(matches!(residual_capability_matrix(&s[..2], &g[..2]), Err(AnalysisError::DegenerateFit(_))));
    }
}
