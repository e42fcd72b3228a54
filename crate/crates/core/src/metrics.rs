//! Point-forecast and interval-forecast accuracy measures.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::MetricsError;
use crate::qrf::PredictionInterval;

fn check_pair(observed: &[f64], predicted: &[f64]) -> Result<usize, MetricsError> {
    if observed.len() != predicted.len() {
        return Err(MetricsError::LengthMismatch {
            observed: observed.len(),
            predicted: predicted.len(),
        });
    }
    if observed.is_empty() {
        return Err(MetricsError::Empty);
    }
    Ok(observed.len())
}

fn mean_of(values: impl Iterator<Item = f64>, n: usize) -> f64 {
    values.sum::<f64>() / n as f64
}

pub fn rmse(observed: &[f64], predicted: &[f64]) -> Result<f64, MetricsError> {
    let n = check_pair(observed, predicted)?;
    Ok(mean_of(observed.iter().zip(predicted).map(|(y, p)| (y - p).powi(2)), n).sqrt())
}

/// Mean absolute percentage error, in percent.
pub fn mape(observed: &[f64], predicted: &[f64]) -> Result<f64, MetricsError> {
    let n = check_pair(observed, predicted)?;
    if let Some(i) = observed.iter().position(|&y| y == 0.0) {
        return Err(MetricsError::ZeroDenominator(i));
    }
    Ok(mean_of(observed.iter().zip(predicted).map(|(y, p)| ((y - p) / y).abs()), n) * 100.0)
}

pub fn mae(observed: &[f64], predicted: &[f64]) -> Result<f64, MetricsError> {
    let n = check_pair(observed, predicted)?;
    Ok(mean_of(observed.iter().zip(predicted).map(|(y, p)| (y - p).abs()), n))
}

/// `1 - SS_res / SS_tot`, with `SS_tot` about the observed mean.
pub fn r_squared(observed: &[f64], predicted: &[f64]) -> Result<f64, MetricsError> {
    let n = check_pair(observed, predicted)?;
    if n < 2 {
        return Err(MetricsError::TooFewPoints { required: 2, found: n });
    }
    let ybar = mean_of(observed.iter().copied(), n);
    let ss_tot: f64 = observed.iter().map(|y| (y - ybar).powi(2)).sum();
    if ss_tot == 0.0 {
        return Err(MetricsError::ZeroVariance);
    }
    let ss_res: f64 = observed.iter().zip(predicted).map(|(y, p)| (y - p).powi(2)).sum();
    Ok(1.0 - ss_res / ss_tot)
}

/// Mean of `observed - predicted`; positive when forecasts run low.
pub fn bias(observed: &[f64], predicted: &[f64]) -> Result<f64, MetricsError> {
    let n = check_pair(observed, predicted)?;
    Ok(mean_of(observed.iter().zip(predicted).map(|(y, p)| y - p), n))
}

/// Mean check loss `tau (y - q)+ + (1 - tau) (q - y)+`.
pub fn pinball_loss(observed: &[f64], predicted: &[f64], tau: f64) -> Result<f64, MetricsError> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(MetricsError::InvalidTau(tau));
    }
    let n = check_pair(observed, predicted)?;
    Ok(mean_of(
        observed.iter().zip(predicted).map(|(y, q)| {
            let e = y - q;
            if e >= 0.0 {
                tau * e
            } else {
                (1.0 - tau) * -e
            }
        }),
        n,
    ))
}

/// Percentage of observations inside their intervals, endpoints included.
pub fn picp(observed: &[f64], intervals: &[PredictionInterval]) -> Result<f64, MetricsError> {
    if observed.len() != intervals.len() {
        return Err(MetricsError::LengthMismatch {
            observed: observed.len(),
            predicted: intervals.len(),
        });
    }
    if observed.is_empty() {
        return Err(MetricsError::Empty);
    }
    let covered = observed.iter().zip(intervals).filter(|(y, pi)| pi.contains(**y)).count();
    Ok(100.0 * covered as f64 / observed.len() as f64)
}

/// Mean interval width as a percentage of `target_range`.
pub fn pinaw(intervals: &[PredictionInterval], target_range: f64) -> Result<f64, MetricsError> {
    if !(target_range > 0.0 && target_range.is_finite()) {
        return Err(MetricsError::NonPositiveRange(target_range));
    }
    if intervals.is_empty() {
        return Err(MetricsError::Empty);
    }
    let total: f64 = intervals.iter().map(PredictionInterval::width).sum();
    Ok(100.0 * total / (intervals.len() as f64 * target_range))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub rmse: f64,
    pub mape: f64,
    pub r_squared: f64,
    pub bias: f64,
    pub picp: Option<f64>,
    pub pinaw: Option<f64>,
    /// Nominal interval level in percent, e.g. 90.
    pub confidence_level: Option<f64>,
}

impl EvaluationReport {
    /// Point metrics only.
    pub fn point(observed: &[f64], predicted: &[f64]) -> Result<Self, MetricsError> {
        Ok(Self {
            rmse: rmse(observed, predicted)?,
            mape: mape(observed, predicted)?,
            r_squared: r_squared(observed, predicted)?,
            bias: bias(observed, predicted)?,
            picp: None,
            pinaw: None,
            confidence_level: None,
        })
    }

    /// Point metrics plus interval metrics; `level` is a fraction such as
    /// 0.9 and is echoed in percent.
    pub fn with_intervals(
        observed: &[f64],
        predicted: &[f64],
        intervals: &[PredictionInterval],
        target_range: f64,
        level: f64,
    ) -> Result<Self, MetricsError> {
        let mut report = Self::point(observed, predicted)?;
        report.picp = Some(picp(observed, intervals)?);
        report.pinaw = Some(pinaw(intervals, target_range)?);
        report.confidence_level = Some((level * 100.0 * 1e9).round() / 1e9);
        Ok(report)
    }

    /// Fixed-width text table: point metrics, then interval indices.
    pub fn to_table(&self) -> String {
        let mut out = String::from("Evaluation metrics\n");
        let _ = writeln!(out, "{:<10} {:>10}", "Metric", "Value");
        let _ = writeln!(out, "{:<10} {:>10.4}", "RMSE", self.rmse);
        let _ = writeln!(out, "{:<10} {:>10.4}", "MAPE(%)", self.mape);
        let _ = writeln!(out, "{:<10} {:>10.4}", "R-squared", self.r_squared);
        let _ = writeln!(out, "{:<10} {:>10.4}", "Bias", self.bias);
        if let (Some(picp), Some(pinaw)) = (self.picp, self.pinaw) {
            out.push_str("\nPrediction interval evaluation indices\n");
            let _ = writeln!(out, "{:<18} {:>9} {:>9}", "Confidence level", "PICP(%)", "PINAW(%)");
            let level = self.confidence_level.map_or_else(|| "-".to_string(), |l| format!("{l}%"));
            let _ = writeln!(out, "{:<18} {:>9.2} {:>9.2}", level, picp, pinaw);
        }
        out
    }

    /// `key=value` lines in a fixed order; absent fields are omitted.
    pub fn to_kv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "rmse={}", self.rmse);
        let _ = writeln!(out, "mape={}", self.mape);
        let _ = writeln!(out, "r_squared={}", self.r_squared);
        let _ = writeln!(out, "bias={}", self.bias);
        for (key, value) in [
            ("picp", self.picp),
            ("pinaw", self.pinaw),
            ("confidence_level", self.confidence_level),
        ] {
            if let Some(v) = value {
                let _ = writeln!(out, "{key}={v}");
            }
        }
        out
    }
}
