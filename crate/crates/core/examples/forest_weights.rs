//! Forest weights: how much each training row speaks for a query point.

use qrfsj::dataset::Dataset;
use qrfsj::forest::{Forest, ForestConfig};

fn main() -> qrfsj::Result<()> {
    // y = 10 * x0 with a little structure in x1
    let x: Vec<Vec<f64>> = (0..30).map(|i| vec![i as f64 / 29.0, (i % 5) as f64 / 4.0]).collect();
    let y: Vec<f64> = x.iter().map(|r| 10.0 * r[0] + r[1]).collect();
    let data = Dataset::with_index_years(vec!["x0".into(), "x1".into()], x, y)?;
    let forest = Forest::fit(
        &data,
        &ForestConfig {
            ntree: 200,
            seed: 1,
            ..Default::default()
        },
    )?;

    let query = [0.5, 0.5];
    let w = forest.forest_weights(&query)?;
    let mut top: Vec<(usize, f64)> = w.as_slice().iter().copied().enumerate().filter(|p| p.1 > 0.0).collect();
    top.sort_by(|a, b| b.1.total_cmp(&a.1));
    println!("query {query:?}: {} rows carry weight, sum {:.15}", top.len(), w.sum());
    for (i, wi) in top.iter().take(8) {
        println!("  row {i:>2}  x = {:?}  y = {:.3}  w = {wi:.4}", data.row(*i), data.target()[*i]);
    }
    println!("weighted mean {:.4} == forest mean {:.4}", w.dot(data.target()), forest.predict_mean(&query)?);

    let t0 = forest.tree_weights(0, &query)?;
    println!("tree 0 alone spreads weight over {} rows", t0.as_slice().iter().filter(|&&v| v > 0.0).count());
    Ok(())
}
