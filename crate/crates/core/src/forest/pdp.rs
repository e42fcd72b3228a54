//! Partial dependence of forest predictions on one or two features.

use rayon::prelude::*;

use crate::dataset::Dataset;
use crate::error::ForestError;

use super::Forest;

/// `points` equally spaced values between the column's min and max.
pub fn default_grid(data: &Dataset, feature: usize, points: usize) -> Vec<f64> {
    let col = data.column(feature);
    let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..points)
            .map(|i| {
                if i == points - 1 {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (points - 1) as f64
                }
            })
            .collect(),
    }
}

impl Forest {
    fn check_feature(&self, feature: usize) -> Result<(), ForestError> {
        if feature >= self.n_features() {
            return Err(ForestError::FeatureOutOfRange {
                index: feature,
                count: self.n_features(),
            });
        }
        Ok(())
    }

    /// Average prediction over `data` with the given features overwritten.
    fn averaged_prediction(&self, data: &Dataset, fixed: &[(usize, f64)]) -> Result<f64, ForestError> {
        let mut x = vec![0.0; data.n_features()];
        let mut total = 0.0;
        for row in data.features() {
            x.copy_from_slice(row);
            for &(j, v) in fixed {
                x[j] = v;
            }
            total += self.predict_mean(&x)?;
        }
        Ok(total / data.len() as f64)
    }

    /// `(g, mean prediction with feature set to g)` for each grid value.
    ///
    /// Grid values outside the observed range are allowed and extrapolate
    /// like any out-of-range query.
    pub fn partial_dependence(
        &self,
        data: &Dataset,
        feature: usize,
        grid: &[f64],
    ) -> Result<Vec<(f64, f64)>, ForestError> {
        if grid.is_empty() {
            return Err(ForestError::EmptyGrid);
        }
        self.check_feature(feature)?;
        grid.par_iter()
            .map(|&g| Ok((g, self.averaged_prediction(data, &[(feature, g)])?)))
            .collect()
    }

    /// Surface over `grid_a x grid_b`: entry `[i][j]` fixes `feature_a` at
    /// `grid_a[i]` and `feature_b` at `grid_b[j]`.
    pub fn partial_dependence_2d(
        &self,
        data: &Dataset,
        feature_a: usize,
        feature_b: usize,
        grid_a: &[f64],
        grid_b: &[f64],
    ) -> Result<Vec<Vec<f64>>, ForestError> {
        if grid_a.is_empty() || grid_b.is_empty() {
            return Err(ForestError::EmptyGrid);
        }
        self.check_feature(feature_a)?;
        self.check_feature(feature_b)?;
        grid_a
            .par_iter()
            .map(|&a| {
                grid_b
                    .iter()
                    .map(|&b| self.averaged_prediction(data, &[(feature_a, a), (feature_b, b)]))
                    .collect()
            })
            .collect()
    }
}
