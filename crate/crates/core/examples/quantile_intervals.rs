//! Conditional quantiles and central prediction intervals on data whose
//! noise grows with x.

use qrfsj::dataset::Dataset;
use qrfsj::forest::{Forest, ForestConfig};
use qrfsj::qrf::{conditional_cdf, predict_median, prediction_interval};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> qrfsj::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let n = 1000;
    let x: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.random::<f64>()]).collect();
    let y: Vec<f64> = x.iter().map(|r| r[0] + r[0] * (rng.random::<f64>() - 0.5)).collect();
    let forest = Forest::fit(&Dataset::with_index_years(vec!["x".into()], x, y)?, &ForestConfig::default())?;

    println!("{:>5} {:>8} {:>8} {:>8} {:>8}", "x", "q05", "median", "q95", "width");
    for x in [0.1, 0.3, 0.5, 0.7, 0.9] {
        let pi = prediction_interval(&forest, &[x], 0.9)?;
        println!(
            "{x:>5.1} {:>8.3} {:>8.3} {:>8.3} {:>8.3}",
            pi.lower,
            predict_median(&forest, &[x])?,
            pi.upper,
            pi.width()
        );
    }

    let cdf = conditional_cdf(&forest, &[0.8])?;
    println!("\nF(y | x=0.8) has {} support points", cdf.support().len());
    for tau in [0.01, 0.25, 0.5, 0.75, 0.99] {
        println!("  Q({tau}) = {:.4}", cdf.quantile(tau)?);
    }
    Ok(())
}
