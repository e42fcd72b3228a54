//! Quantile regression forest: conditional CDFs, quantiles, median point
//! forecasts and prediction intervals from forest weights.

use crate::error::QrfError;
use crate::forest::Forest;
use crate::numeric::ExactSum;

/// Step-function estimate of `P(Y <= y | X = x)`.
///
/// `support` holds the distinct training targets carrying positive weight,
/// strictly increasing; `cum_weights[i]` is the total weight on targets
/// `<= support[i]`. Cumulative sums are exactly rounded, so they do not
/// depend on the order weights were accumulated in.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalCdf {
    support: Vec<f64>,
    cum_weights: Vec<f64>,
}

impl ConditionalCdf {
    /// Build from per-observation weights on (possibly repeated) targets.
    pub fn from_weighted(targets: &[f64], weights: &[f64]) -> Result<Self, QrfError> {
        if targets.is_empty()
            || targets.len() != weights.len()
            || targets.iter().any(|t| !t.is_finite())
            || weights.iter().any(|w| !w.is_finite() || *w < 0.0)
        {
            return Err(QrfError::InvalidWeights);
        }
        let mut pairs: Vec<(f64, f64)> = targets
            .iter()
            .zip(weights)
            .filter(|(_, &w)| w > 0.0)
            .map(|(&t, &w)| (t, w))
            .collect();
        if pairs.is_empty() {
            return Err(QrfError::InvalidWeights);
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

        let mut support = Vec::new();
        let mut cum_weights = Vec::new();
        let mut acc = ExactSum::new();
        for (i, &(t, w)) in pairs.iter().enumerate() {
            acc.add(w);
            let last_of_tie = pairs.get(i + 1).is_none_or(|next| next.0 != t);
            if last_of_tie {
                support.push(t);
                cum_weights.push(acc.value());
            }
        }
        Ok(Self {
            support,
            cum_weights,
        })
    }

    /// Unit mass at `value`.
    pub fn point_mass(value: f64) -> Self {
        Self {
            support: vec![value],
            cum_weights: vec![1.0],
        }
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    pub fn cum_weights(&self) -> &[f64] {
        &self.cum_weights
    }

    /// Total mass; one up to rounding of the input weights.
    pub fn total(&self) -> f64 {
        *self.cum_weights.last().expect("nonempty support")
    }

    pub fn is_point_mass(&self) -> bool {
        self.support.len() == 1
    }

    /// Right-continuous evaluation: includes the mass sitting at `y`.
    pub fn eval(&self, y: f64) -> f64 {
        let k = self.support.partition_point(|&s| s <= y);
        if k == 0 {
            0.0
        } else {
            self.cum_weights[k - 1]
        }
    }

    /// `inf { y : F(y) >= tau }`, always a member of the support.
    ///
    /// When rounding leaves the total mass a hair below `tau`, the largest
    /// support point is returned.
    pub fn quantile(&self, tau: f64) -> Result<f64, QrfError> {
        if !(tau > 0.0 && tau < 1.0) {
            return Err(QrfError::InvalidTau(tau));
        }
        Ok(self.quantile_unchecked(tau))
    }

    fn quantile_unchecked(&self, tau: f64) -> f64 {
        let k = self.cum_weights.partition_point(|&c| c < tau);
        self.support[k.min(self.support.len() - 1)]
    }

    /// Quantiles at strictly increasing levels in `(0, 1)`.
    pub fn quantiles(&self, taus: &[f64]) -> Result<Vec<f64>, QrfError> {
        validate_taus(taus)?;
        Ok(taus.iter().map(|&t| self.quantile_unchecked(t)).collect())
    }

    /// Central interval `[q((1-level)/2), q(1-(1-level)/2)]`.
    pub fn interval(&self, level: f64) -> Result<PredictionInterval, QrfError> {
        if !(level > 0.0 && level < 1.0) {
            return Err(QrfError::InvalidLevel(level));
        }
        let (lo, hi) = interval_taus(level);
        Ok(PredictionInterval {
            lower: self.quantile_unchecked(lo),
            upper: self.quantile_unchecked(hi),
            nominal_level: level,
        })
    }
}

/// Lower and upper quantile levels of a central interval.
pub fn interval_taus(level: f64) -> (f64, f64) {
    let alpha = 1.0 - level;
    (alpha / 2.0, 1.0 - alpha / 2.0)
}

fn validate_taus(taus: &[f64]) -> Result<(), QrfError> {
    if let Some(&t) = taus.iter().find(|&&t| !(t > 0.0 && t < 1.0)) {
        return Err(QrfError::InvalidTau(t));
    }
    if taus.windows(2).any(|w| w[0] >= w[1]) {
        return Err(QrfError::UnsortedTaus);
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictionInterval {
    pub lower: f64,
    pub upper: f64,
    pub nominal_level: f64,
}

impl PredictionInterval {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    /// Inclusive at both ends.
    pub fn contains(&self, y: f64) -> bool {
        self.lower <= y && y <= self.upper
    }
}

/// Conditional CDF at `x` from the forest weights.
pub fn conditional_cdf(forest: &Forest, x: &[f64]) -> Result<ConditionalCdf, QrfError> {
    let w = forest.forest_weights(x)?;
    ConditionalCdf::from_weighted(forest.train_targets(), w.as_slice())
}

pub fn quantile(cdf: &ConditionalCdf, tau: f64) -> Result<f64, QrfError> {
    cdf.quantile(tau)
}

/// Median point forecast (lower median at an exact 50% split).
pub fn predict_median(forest: &Forest, x: &[f64]) -> Result<f64, QrfError> {
    conditional_cdf(forest, x)?.quantile(0.5)
}

pub fn prediction_interval(forest: &Forest, x: &[f64], level: f64) -> Result<PredictionInterval, QrfError> {
    if !(level > 0.0 && level < 1.0) {
        return Err(QrfError::InvalidLevel(level));
    }
    conditional_cdf(forest, x)?.interval(level)
}

/// `(tau, q_tau)` pairs from a single CDF evaluation.
pub fn quantile_curve(forest: &Forest, x: &[f64], taus: &[f64]) -> Result<Vec<(f64, f64)>, QrfError> {
    validate_taus(taus)?;
    let cdf = conditional_cdf(forest, x)?;
    Ok(taus.iter().map(|&t| (t, cdf.quantile_unchecked(t))).collect())
}

/// `size` evenly spaced levels `i / (size + 1)`; 99 gives 0.01, ..., 0.99.
pub fn uniform_taus(size: usize) -> Vec<f64> {
    (1..=size).map(|i| i as f64 / (size + 1) as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn example() -> ConditionalCdf {
        ConditionalCdf::from_weighted(&[1.0, 2.0, 3.0], &[0.25, 0.25, 0.5]).unwrap()
    }

    #[test]
    fn eval_is_right_continuous() {
        let c = example();
        assert_eq!(c.eval(0.5), 0.0);
        assert_eq!(c.eval(1.5), 0.25);
        assert_eq!(c.eval(2.0), 0.5);
        assert_eq!(c.eval(3.0), 1.0);
        assert_eq!(c.eval(9.0), 1.0);
    }

    #[test]
    fn inf_quantiles() {
        let c = example();
        assert_eq!(c.quantile(0.5).unwrap(), 2.0);
        assert_eq!(c.quantile(0.75).unwrap(), 3.0);
        assert_eq!(c.quantile(0.2).unwrap(), 1.0);
        assert_eq!(c.quantile(0.25).unwrap(), 1.0);
        assert_eq!(c.quantile(0.0), Err(QrfError::InvalidTau(0.0)));
        assert_eq!(c.quantile(1.0), Err(QrfError::InvalidTau(1.0)));
    }

    #[test]
    fn lower_median_at_even_split() {
        let c = ConditionalCdf::from_weighted(&[1.0, 3.0], &[0.5, 0.5]).unwrap();
        assert_eq!(c.quantile(0.5).unwrap(), 1.0);
    }

    #[test]
    fn ties_merge_and_zero_weights_drop() {
        let c = ConditionalCdf::from_weighted(&[2.0, 1.0, 2.0, 5.0], &[0.25, 0.5, 0.25, 0.0]).unwrap();
        assert_eq!(c.support(), &[1.0, 2.0]);
        assert_eq!(c.cum_weights(), &[0.5, 1.0]);
    }

    #[test]
    fn constant_targets_give_point_mass() {
        let c = ConditionalCdf::from_weighted(&[1.2; 4], &[0.1, 0.2, 0.3, 0.4]).unwrap();
        assert!(c.is_point_mass());
        assert_eq!(c.support(), &[1.2]);
        assert_eq!(c.cum_weights(), &[1.0]);
        let pi = c.interval(0.9).unwrap();
        assert_eq!((pi.lower, pi.upper), (1.2, 1.2));
    }

    #[test]
    fn ninety_percent_uses_five_and_ninety_five() {
        let (lo, hi) = interval_taus(0.9);
        assert!((lo - 0.05).abs() < 1e-15);
        assert!((hi - 0.95).abs() < 1e-15);
    }

    #[test]
    fn invalid_inputs() {
        assert_eq!(
            ConditionalCdf::from_weighted(&[1.0], &[-0.1]),
            Err(QrfError::InvalidWeights)
        );
        assert_eq!(ConditionalCdf::from_weighted(&[], &[]), Err(QrfError::InvalidWeights));
        assert_eq!(ConditionalCdf::from_weighted(&[1.0], &[0.0]), Err(QrfError::InvalidWeights));
        let c = example();
        assert_eq!(c.quantiles(&[0.5, 0.4]), Err(QrfError::UnsortedTaus));
        assert_eq!(c.interval(1.0), Err(QrfError::InvalidLevel(1.0)));
    }

    #[test]
    fn uniform_tau_grid() {
        let t = uniform_taus(99);
        assert_eq!(t.len(), 99);
        assert_eq!(t[0], 0.01);
        assert_eq!(t[98], 0.99);
    }

    fn arb_cdf() -> impl Strategy<Value = ConditionalCdf> {
        prop::collection::vec((0i32..20, 0.0f64..1.0), 1..30).prop_filter_map("positive mass", |v| {
            let t: Vec<f64> = v.iter().map(|p| p.0 as f64 * 0.1).collect();
            let w: Vec<f64> = v.iter().map(|p| p.1).collect();
            let s: f64 = w.iter().sum();
            if s <= 0.0 {
                return None;
            }
            let w: Vec<f64> = w.iter().map(|x| x / s).collect();
            ConditionalCdf::from_weighted(&t, &w).ok()
        })
    }

    proptest! {
        #[test]
        fn cdf_is_valid(c in arb_cdf()) {
            prop_assert!(c.support().windows(2).all(|w| w[0] < w[1]));
            prop_assert!(c.cum_weights().windows(2).all(|w| w[0] <= w[1]));
            prop_assert!(c.cum_weights().iter().all(|&v| (0.0..=1.0 + 1e-12).contains(&v)));
            prop_assert!((c.total() - 1.0).abs() < 1e-9);
        }

        #[test]
        fn quantile_monotone_and_in_support(c in arb_cdf(), a in 0.001f64..0.999, b in 0.001f64..0.999) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let ql = c.quantile(lo).unwrap();
            let qh = c.quantile(hi).unwrap();
            prop_assert!(ql <= qh);
            prop_assert!(c.support().contains(&ql));
        }
    }
}
