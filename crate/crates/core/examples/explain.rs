//! Permutation importance and partial dependence on a planted signal.

use qrfsj::dataset::Dataset;
use qrfsj::forest::{default_grid, Forest, ForestConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> qrfsj::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let n = 400;
    let x: Vec<Vec<f64>> = (0..n).map(|_| (0..4).map(|_| rng.random::<f64>()).collect()).collect();
    // x0 linear, x1 a bump, x2 and x3 noise
    let y: Vec<f64> = x
        .iter()
        .map(|r| 5.0 * r[0] + 2.0 * (std::f64::consts::PI * r[1]).sin() + 0.3 * (rng.random::<f64>() - 0.5))
        .collect();
    let names = ["linear", "bump", "noise_a", "noise_b"].map(String::from).to_vec();
    let data = Dataset::with_index_years(names, x, y)?;
    let forest = Forest::fit(&data, &ForestConfig::default())?;

    let importance = forest.permutation_importance(&data)?;
    print!("{}", importance.to_table());

    for j in importance.top_k(2) {
        let grid = default_grid(&data, j, 9);
        let pdp = forest.partial_dependence(&data, j, &grid)?;
        println!("\npartial dependence on {}", data.feature_names()[j]);
        for (g, p) in pdp {
            println!("  {g:.3}  {p:.3}");
        }
    }

    let grid = default_grid(&data, 0, 4);
    let surface = forest.partial_dependence_2d(&data, 0, 1, &grid, &grid)?;
    println!("\nlinear x bump");
    for row in surface {
        println!("  {}", row.iter().map(|v| format!("{v:6.2}")).collect::<Vec<_>>().join(" "));
    }
    Ok(())
}
