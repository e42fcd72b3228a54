//! Epanechnikov kernel density estimation with a Sheather-Jones
//! solve-the-equation bandwidth, and the density forecast built on QRF
//! quantiles.
//!
//! The bandwidth solves `h = [R(K) / (n mu2(K)^2 R(f''; g(h)))]^(1/5)` for
//! the Epanechnikov kernel (`R(K) = 3/5`, `mu2(K) = 1/5`), i.e. the
//! minimiser of the AMISE
//!
//! ```text
//! AMISE(h) = R(K) / (n h) + h^4 R(f'') (mu2(K) / 2)^2
//! ```
//!
//! with `R(f'')` replaced by a kernel estimate at a pilot bandwidth tied to
//! `h`. Derivative functionals are estimated with Gaussian pilot kernels
//! over binned pairwise distances; the pilot relation is the usual
//! two-stage Gaussian one, mapped onto the Epanechnikov scale through the
//! canonical bandwidth ratio `(30 sqrt(pi))^(1/5)`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::error::KdeError;
use crate::forest::Forest;
use crate::numeric::{sample_std, sorted_quantile};
use crate::qrf::{quantile_curve, uniform_taus};

/// `R(K) = integral of K^2` for the Epanechnikov kernel.
pub const EPANECHNIKOV_ROUGHNESS: f64 = 0.6;
/// `mu2(K) = integral of u^2 K(u)` for the Epanechnikov kernel.
pub const EPANECHNIKOV_MU2: f64 = 0.2;
/// Rule-of-thumb multiplier used when the bandwidth equation has no
/// bracketed root: `1.06` scaled by the Gaussian-to-Epanechnikov ratio.
pub const SILVERMAN_EPANECHNIKOV: f64 = 2.345;
/// Default number of points on a density curve.
pub const DEFAULT_GRID_POINTS: usize = 512;

const BINS: usize = 1000;
const BISECTION_RTOL: f64 = 1e-6;
const MIN_SJ_SAMPLES: usize = 8;

/// `K(u) = 3/4 (1 - u^2)` on `[-1, 1]`, zero outside.
pub fn epanechnikov(u: f64) -> f64 {
    if u.abs() <= 1.0 {
        0.75 * (1.0 - u * u)
    } else {
        0.0
    }
}

/// Ratio between AMISE-optimal Epanechnikov and Gaussian bandwidths.
pub fn canonical_ratio() -> f64 {
    let gaussian_roughness = 1.0 / (2.0 * PI.sqrt());
    (EPANECHNIKOV_ROUGHNESS / (EPANECHNIKOV_MU2 * EPANECHNIKOV_MU2) / gaussian_roughness).powf(0.2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BandwidthMethod {
    SheatherJones,
    SilvermanFallback,
    Fixed,
}

impl BandwidthMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            BandwidthMethod::SheatherJones => "sheather_jones",
            BandwidthMethod::SilvermanFallback => "silverman_fallback",
            BandwidthMethod::Fixed => "fixed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bandwidth {
    value: f64,
    method: BandwidthMethod,
}

impl Bandwidth {
    pub fn fixed(value: f64) -> Result<Self, KdeError> {
        Self::new(value, BandwidthMethod::Fixed)
    }

    fn new(value: f64, method: BandwidthMethod) -> Result<Self, KdeError> {
        if !(value > 0.0 && value.is_finite()) {
            return Err(KdeError::InvalidBandwidth(value));
        }
        Ok(Self { value, method })
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn method(&self) -> BandwidthMethod {
        self.method
    }
}

/// The three ingredients of the AMISE at the selected bandwidth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmiseFunctionals {
    pub r_kernel: f64,
    pub mu2_kernel: f64,
    /// Estimate of `R(f'')` at the pilot bandwidth used for the final `h`.
    pub r_f2_estimate: f64,
}

impl AmiseFunctionals {
    pub fn amise(&self, h: f64, n: usize) -> f64 {
        self.r_kernel / (n as f64 * h) + h.powi(4) * self.r_f2_estimate * (self.mu2_kernel / 2.0).powi(2)
    }

    /// Closed-form minimiser of [`AmiseFunctionals::amise`].
    pub fn optimal_bandwidth(&self, n: usize) -> f64 {
        (self.r_kernel / (n as f64 * self.mu2_kernel.powi(2) * self.r_f2_estimate)).powf(0.2)
    }
}

/// Density values on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityCurve {
    grid: Vec<f64>,
    density: Vec<f64>,
    bandwidth: Bandwidth,
    sample_count: usize,
}

impl DensityCurve {
    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn bandwidth(&self) -> Bandwidth {
        self.bandwidth
    }

    pub fn sample_count(&self) -> usize {
        self.sample_count
    }

    /// Trapezoidal integral over the grid.
    pub fn integral(&self) -> f64 {
        self.grid
            .windows(2)
            .zip(self.density.windows(2))
            .map(|(g, d)| (g[1] - g[0]) * (d[0] + d[1]) / 2.0)
            .sum()
    }

    /// Smallest and largest grid points with positive density.
    pub fn positive_region(&self) -> Option<(f64, f64)> {
        let first = self.density.iter().position(|&d| d > 0.0)?;
        let last = self.density.iter().rposition(|&d| d > 0.0)?;
        Some((self.grid[first], self.grid[last]))
    }

    /// Density at `y` by direct re-evaluation is not stored; this
    /// interpolates linearly between grid points (zero outside the grid).
    pub fn interpolate(&self, y: f64) -> f64 {
        let k = self.grid.partition_point(|&g| g <= y);
        if k == 0 || k == self.grid.len() && y > *self.grid.last().unwrap() {
            return 0.0;
        }
        if k == self.grid.len() {
            return *self.density.last().unwrap();
        }
        let (g0, g1) = (self.grid[k - 1], self.grid[k]);
        let (d0, d1) = (self.density[k - 1], self.density[k]);
        d0 + (d1 - d0) * (y - g0) / (g1 - g0)
    }

    /// Two-column CSV preceded by `#` comment lines with the bandwidth.
    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "# bandwidth={}\n# method={}\n# samples={}\ny,density\n",
            self.bandwidth.value,
            self.bandwidth.method.as_str(),
            self.sample_count
        );
        for (g, d) in self.grid.iter().zip(&self.density) {
            let _ = writeln!(out, "{g},{d}");
        }
        out
    }
}

/// `f(x) = 1/(N h) sum_i K((X_i - x) / h)` at every grid point.
pub fn kde_evaluate(samples: &[f64], bandwidth: Bandwidth, grid: &[f64]) -> Result<DensityCurve, KdeError> {
    if samples.is_empty() {
        return Err(KdeError::EmptySamples);
    }
    if grid.is_empty() || grid.windows(2).any(|w| w[0] >= w[1]) || grid.iter().any(|g| !g.is_finite()) {
        return Err(KdeError::InvalidGrid);
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let h = bandwidth.value;
    let norm = 1.0 / (sorted.len() as f64 * h);
    let density = grid
        .iter()
        .map(|&x| {
            let start = sorted.partition_point(|&s| s < x - h);
            let end = sorted.partition_point(|&s| s <= x + h);
            sorted[start..end]
                .iter()
                .map(|&s| epanechnikov((s - x) / h))
                .sum::<f64>()
                * norm
        })
        .collect();
    Ok(DensityCurve {
        grid: grid.to_vec(),
        density,
        bandwidth,
        sample_count: samples.len(),
    })
}

/// Pairwise distances between samples, binned at a fixed width.
struct BinnedPairs {
    /// `counts[k]`: number of pairs `i < j` whose bins are `k` apart.
    counts: Vec<f64>,
    width: f64,
    n: f64,
}

impl BinnedPairs {
    fn new(samples: &[f64]) -> Self {
        let lo = samples.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let width = (hi - lo) * 1.01 / BINS as f64;
        let mut bins = vec![0.0f64; BINS];
        for &x in samples {
            let b = (((x - lo) / width) as usize).min(BINS - 1);
            bins[b] += 1.0;
        }
        let mut counts = vec![0.0; BINS];
        for (i, &ci) in bins.iter().enumerate() {
            if ci == 0.0 {
                continue;
            }
            counts[0] += ci * (ci - 1.0) / 2.0;
            for (j, &cj) in bins.iter().enumerate().skip(i + 1) {
                counts[j - i] += ci * cj;
            }
        }
        Self {
            counts,
            width,
            n: samples.len() as f64,
        }
    }

    /// `sum_{i != j} phi_r((X_i - X_j)/g) + n phi_r(0)`, divided by
    /// `n (n - 1) g^(r+1)`, for the Gaussian derivative `phi_r`.
    fn functional(&self, g: f64, order: Order) -> f64 {
        let mut sum = 0.0;
        for (k, &c) in self.counts.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let z2 = (k as f64 * self.width / g).powi(2);
            if z2 >= 1000.0 {
                break;
            }
            sum += c * order.poly(z2) * (-z2 / 2.0).exp();
        }
        let total = 2.0 * sum + self.n * order.poly(0.0);
        total / (self.n * (self.n - 1.0) * g.powi(order.power()) * (2.0 * PI).sqrt())
    }
}

#[derive(Clone, Copy)]
enum Order {
    Fourth,
    Sixth,
}

impl Order {
    /// Hermite factor of the Gaussian derivative, as a polynomial in `z^2`.
    fn poly(self, z2: f64) -> f64 {
        match self {
            Order::Fourth => z2 * z2 - 6.0 * z2 + 3.0,
            Order::Sixth => z2 * z2 * z2 - 15.0 * z2 * z2 + 45.0 * z2 - 15.0,
        }
    }

    fn power(self) -> i32 {
        match self {
            Order::Fourth => 5,
            Order::Sixth => 7,
        }
    }
}

/// Solve-the-equation bandwidth for the Epanechnikov kernel.
///
/// Falls back to `2.345 * sd * n^(-1/5)` (tagged
/// [`BandwidthMethod::SilvermanFallback`]) when the pilot functionals are
/// unusable or the equation has no sign change on
/// `[sd / n, 10 sd n^(1/5)]`.
pub fn sj_bandwidth(samples: &[f64]) -> Result<Bandwidth, KdeError> {
    sj_bandwidth_with_functionals(samples).map(|(b, _)| b)
}

/// [`sj_bandwidth`] plus the AMISE functionals at the solution (`None` on
/// fallback).
pub fn sj_bandwidth_with_functionals(samples: &[f64]) -> Result<(Bandwidth, Option<AmiseFunctionals>), KdeError> {
    let n = samples.len();
    if n == 0 {
        return Err(KdeError::EmptySamples);
    }
    if n < MIN_SJ_SAMPLES {
        return Err(KdeError::TooFewSamples {
            required: MIN_SJ_SAMPLES,
            found: n,
        });
    }
    if samples.iter().any(|s| !s.is_finite()) {
        return Err(KdeError::InvalidGrid);
    }
    let sd = sample_std(samples).unwrap_or(0.0);
    if sd.is_nan() || sd <= 0.0 {
        return Err(KdeError::DegenerateSample);
    }
    let nf = n as f64;
    let fallback = || -> Result<(Bandwidth, Option<AmiseFunctionals>), KdeError> {
        Ok((
            Bandwidth::new(SILVERMAN_EPANECHNIKOV * sd * nf.powf(-0.2), BandwidthMethod::SilvermanFallback)?,
            None,
        ))
    };

    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let iqr = sorted_quantile(&sorted, 0.75) - sorted_quantile(&sorted, 0.25);
    let scale = if iqr > 0.0 { sd.min(iqr / 1.349) } else { sd };

    let pairs = BinnedPairs::new(samples);
    // Stage one: normal-reference pilots for psi_4 and psi_6.
    let a = 1.24 * scale * nf.powf(-1.0 / 7.0);
    let b = 1.23 * scale * nf.powf(-1.0 / 9.0);
    let psi4_a = pairs.functional(a, Order::Fourth);
    let neg_psi6_b = -pairs.functional(b, Order::Sixth);
    if !(psi4_a > 0.0 && psi4_a.is_finite() && neg_psi6_b > 0.0 && neg_psi6_b.is_finite()) {
        return fallback();
    }
    let alpha2 = 1.357 * (psi4_a / neg_psi6_b).powf(1.0 / 7.0);
    let ratio = canonical_ratio();

    // Stage two: the pilot for R(f'') scales with h^(5/7) on the Gaussian scale.
    let functionals_at = |h: f64| -> Option<AmiseFunctionals> {
        let g = alpha2 * (h / ratio).powf(5.0 / 7.0);
        let r = pairs.functional(g, Order::Fourth);
        (r > 0.0 && r.is_finite()).then_some(AmiseFunctionals {
            r_kernel: EPANECHNIKOV_ROUGHNESS,
            mu2_kernel: EPANECHNIKOV_MU2,
            r_f2_estimate: r,
        })
    };
    let equation = |h: f64| -> Option<f64> { functionals_at(h).map(|f| f.optimal_bandwidth(n) - h) };

    let mut lo = sd / nf;
    let mut hi = 10.0 * sd * nf.powf(0.2);
    let (Some(f_lo), Some(f_hi)) = (equation(lo), equation(hi)) else {
        return fallback();
    };
    if f_lo.signum() == f_hi.signum() || f_lo == 0.0 || f_hi == 0.0 {
        return fallback();
    }
    let lo_positive = f_lo > 0.0;
    for _ in 0..200 {
        let mid = lo + (hi - lo) / 2.0;
        if hi - lo <= BISECTION_RTOL * mid {
            break;
        }
        match equation(mid) {
            None => return fallback(),
            Some(v) if (v > 0.0) == lo_positive => lo = mid,
            Some(_) => hi = mid,
        }
    }
    let h = lo + (hi - lo) / 2.0;
    match functionals_at(h) {
        Some(f) => Ok((Bandwidth::new(h, BandwidthMethod::SheatherJones)?, Some(f))),
        None => fallback(),
    }
}

/// Evenly spaced grid over `[lo, hi]` with `points` points.
pub fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
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

/// SJ bandwidth, then the KDE on `[min - h, max + h]` with `grid_points`
/// points, covering the whole kernel support.
pub fn density_curve(samples: &[f64], grid_points: usize) -> Result<DensityCurve, KdeError> {
    if grid_points < 32 {
        return Err(KdeError::TooCoarse {
            what: "grid points",
            required: 32,
            found: grid_points,
        });
    }
    let bw = sj_bandwidth(samples)?;
    let lo = samples.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let h = bw.value();
    kde_evaluate(samples, bw, &linspace(lo - h, hi + h, grid_points))
}

/// Default quantile levels for density forecasts: 0.01, 0.02, ..., 0.99.
pub fn default_tau_grid() -> Vec<f64> {
    uniform_taus(99)
}

/// Probability density forecast at `x`.
///
/// The conditional quantile function is sampled at `tau_grid` and the
/// resulting pseudo-samples are smoothed with the Epanechnikov kernel at
/// the SJ bandwidth. A point-mass conditional distribution yields
/// [`KdeError::DegenerateSample`].
pub fn density_forecast(
    forest: &Forest,
    x: &[f64],
    tau_grid: &[f64],
    grid_points: usize,
) -> Result<DensityCurve, KdeError> {
    if tau_grid.len() < MIN_SJ_SAMPLES {
        return Err(KdeError::TooCoarse {
            what: "quantile levels",
            required: MIN_SJ_SAMPLES,
            found: tau_grid.len(),
        });
    }
    if grid_points < 32 {
        return Err(KdeError::TooCoarse {
            what: "grid points",
            required: 32,
            found: grid_points,
        });
    }
    let samples: Vec<f64> = quantile_curve(forest, x, tau_grid)?
        .into_iter()
        .map(|(_, q)| q)
        .collect();
    if samples.iter().all(|&s| s == samples[0]) {
        return Err(KdeError::DegenerateSample);
    }
    density_curve(&samples, grid_points)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_values() {
        assert_eq!(epanechnikov(0.0), 0.75);
        assert_eq!(epanechnikov(1.0), 0.0);
        assert_eq!(epanechnikov(-1.0), 0.0);
        assert_eq!(epanechnikov(0.5), 0.5625);
        assert_eq!(epanechnikov(-0.5), 0.5625);
        assert_eq!(epanechnikov(1.0001), 0.0);
    }

    #[test]
    fn kernel_integrates_to_one() {
        // Simpson's rule is exact for the quadratic piece.
        let n = 2000;
        let h = 2.0 / n as f64;
        let mut s = epanechnikov(-1.0) + epanechnikov(1.0);
        for i in 1..n {
            let u = -1.0 + i as f64 * h;
            s += epanechnikov(u) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        assert!((s * h / 3.0 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn kde_small_cases() {
        let b = Bandwidth::fixed(1.0).unwrap();
        let c = kde_evaluate(&[0.0], b, &[0.0, 2.0]).unwrap();
        assert_eq!(c.density(), &[0.75, 0.0]);
        let c = kde_evaluate(&[-0.5, 0.5], b, &[0.0]).unwrap();
        assert_eq!(c.density(), &[0.5625]);
    }

    #[test]
    fn kde_errors() {
        let b = Bandwidth::fixed(1.0).unwrap();
        assert_eq!(kde_evaluate(&[], b, &[0.0]), Err(KdeError::EmptySamples));
        assert_eq!(kde_evaluate(&[0.0], b, &[1.0, 0.0]), Err(KdeError::InvalidGrid));
        assert_eq!(Bandwidth::fixed(0.0), Err(KdeError::InvalidBandwidth(0.0)));
        assert_eq!(Bandwidth::fixed(-1.0), Err(KdeError::InvalidBandwidth(-1.0)));
    }

    #[test]
    fn canonical_ratio_value() {
        assert!((canonical_ratio() - 2.2138).abs() < 1e-3);
    }

    #[test]
    fn sj_rejects_degenerate_and_small() {
        assert_eq!(sj_bandwidth(&[2.0; 20]), Err(KdeError::DegenerateSample));
        assert!(matches!(
            sj_bandwidth(&[1.0, 2.0, 3.0]),
            Err(KdeError::TooFewSamples { .. })
        ));
    }

    #[test]
    fn sj_solution_minimises_amise() {
        let samples: Vec<f64> = (0..200).map(|i| ((i as f64 * 0.61803).fract() - 0.5) * 3.0).collect();
        let (bw, f) = sj_bandwidth_with_functionals(&samples).unwrap();
        assert_eq!(bw.method(), BandwidthMethod::SheatherJones);
        let f = f.unwrap();
        let h = bw.value();
        assert!((f.optimal_bandwidth(200) - h).abs() / h < 1e-5);
        assert!(f.amise(h, 200) <= f.amise(h * 1.01, 200));
        assert!(f.amise(h, 200) <= f.amise(h * 0.99, 200));
    }

    #[test]
    fn symmetric_samples_give_symmetric_density() {
        let half = [0.3, 0.7, 1.1, 1.2, 2.0, 2.5];
        let m = 10.0;
        let samples: Vec<f64> = half.iter().flat_map(|d| [m - d, m + d]).collect();
        let c = density_curve(&samples, 513).unwrap();
        let d = c.density();
        for i in 0..d.len() {
            assert!((d[i] - d[d.len() - 1 - i]).abs() < 1e-9);
        }
        assert!((c.integral() - 1.0).abs() < 0.01);
    }

    #[test]
    fn csv_has_bandwidth_header() {
        let c = kde_evaluate(&[0.0], Bandwidth::fixed(0.5).unwrap(), &[-1.0, 0.0, 1.0]).unwrap();
        let csv = c.to_csv();
        assert!(csv.starts_with("# bandwidth=0.5\n# method=fixed\n# samples=1\ny,density\n"));
        assert_eq!(csv.lines().count(), 7);
    }
}
