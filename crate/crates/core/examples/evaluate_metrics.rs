//! Point and interval metrics on a small hand-made forecast.

use qrfsj::metrics::{self, EvaluationReport};
use qrfsj::qrf::PredictionInterval;

fn main() -> qrfsj::Result<()> {
    let observed = [1.50, 1.33, 1.30, 1.12, 0.98];
    let predicted = [1.11, 1.07, 1.12, 1.10, 1.05];
    let bounds = [(0.56, 1.95), (0.57, 1.88), (0.57, 1.92), (0.80, 1.30), (1.00, 1.40)];
    let intervals: Vec<PredictionInterval> = bounds
        .iter()
        .map(|&(lower, upper)| PredictionInterval {
            lower,
            upper,
            nominal_level: 0.9,
        })
        .collect();

    let report = EvaluationReport::with_intervals(&observed, &predicted, &intervals, 1.4, 0.9)?;
    print!("{}", report.to_table());
    println!();
    for tau in [0.1, 0.5, 0.9] {
        println!("pinball({tau}) = {:.4}", metrics::pinball_loss(&observed, &predicted, tau)?);
    }
    println!("mae = {:.4}", metrics::mae(&observed, &predicted)?);
    Ok(())
}
