//! Density forecast: quantile curve -> pseudo-samples -> Epanechnikov KDE
//! at the Sheather-Jones bandwidth.

use qrfsj::dataset::Dataset;
use qrfsj::forest::{Forest, ForestConfig};
use qrfsj::kde::{default_tau_grid, density_curve, density_forecast, sj_bandwidth, DEFAULT_GRID_POINTS};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn main() -> qrfsj::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let sample: Vec<f64> = (0..500).map(|_| rng.sample(StandardNormal)).collect();
    let h = sj_bandwidth(&sample)?;
    println!("N(0,1), n=500: h = {:.4} ({})", h.value(), h.method().as_str());
    let curve = density_curve(&sample, DEFAULT_GRID_POINTS)?;
    println!("  f(0) ~ {:.3} (true 0.399), integral {:.5}", curve.interpolate(0.0), curve.integral());

    // bimodal response: which mode depends on x1
    let n = 800;
    let x: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.random::<f64>(), rng.random::<f64>()]).collect();
    let y: Vec<f64> = x
        .iter()
        .map(|r| {
            let mode = if rng.random::<f64>() < r[1] { 3.0 } else { 0.0 };
            mode + r[0] + 0.3 * rng.sample::<f64, _>(StandardNormal)
        })
        .collect();
    let data = Dataset::with_index_years(vec!["x0".into(), "x1".into()], x, y)?;
    let forest = Forest::fit(&data, &ForestConfig::default())?;

    let curve = density_forecast(&forest, &[0.5, 0.5], &default_tau_grid(), DEFAULT_GRID_POINTS)?;
    let (lo, hi) = curve.positive_region().unwrap();
    println!(
        "\nforecast at (0.5, 0.5): h = {:.4}, support [{lo:.2}, {hi:.2}], integral {:.4}",
        curve.bandwidth().value(),
        curve.integral()
    );
    let peak = curve.density().iter().cloned().fold(0.0, f64::max);
    for (g, d) in curve.grid().iter().zip(curve.density()).step_by(16) {
        println!("{g:>7.2} {}", "#".repeat((40.0 * d / peak).round() as usize));
    }
    Ok(())
}
